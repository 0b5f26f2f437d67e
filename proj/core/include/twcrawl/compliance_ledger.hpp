#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "twcrawl/clock.hpp"

namespace twcrawl {

enum class LedgerEvent { disclosure, erasure, consent, breach_notice };

std::string_view to_string(LedgerEvent e);
std::optional<LedgerEvent> parse_ledger_event(std::string_view s);

// One immutable audit record. Subjects are pseudonym codes, never raw
// identities.
struct LedgerEntry {
  std::uint64_t seq = 0;
  LedgerEvent event = LedgerEvent::disclosure;
  std::string subject_code;
  std::optional<std::string> beneficiary;
  std::optional<std::string> purpose;
  std::optional<int> retention_days;
  Timestamp at{};
  // consent entries only: the subject is a minor.
  std::optional<bool> minor;

  bool operator==(const LedgerEntry&) const = default;
};

// Everything but seq and at, which the ledger assigns.
struct LedgerDraft {
  LedgerEvent event = LedgerEvent::disclosure;
  std::string subject_code;
  std::optional<std::string> beneficiary;
  std::optional<std::string> purpose;
  std::optional<int> retention_days;
  std::optional<bool> minor;
};

// One JSON object, no trailing newline. Absent optionals are omitted.
std::string serialize_entry(const LedgerEntry& e);
// Throws Error on malformed input.
LedgerEntry parse_entry(std::string_view line);

// Throws ValidationError when the draft can't be recorded: subject must be a
// 32-hex-digit code; disclosures need beneficiary, purpose and a positive
// retention; minor is only meaningful on consent.
void validate_draft(const LedgerDraft& d);

struct BeneficiaryRow {
  std::string beneficiary;
  std::string purpose;
  int retention_days = 0;
  Timestamp at{};

  bool operator==(const BeneficiaryRow&) const = default;
};

struct TransparencyReport {
  std::string code;
  std::vector<LedgerEntry> disclosures;
  std::vector<LedgerEntry> erasures;
  std::vector<LedgerEntry> consents;
  std::vector<LedgerEntry> breach_notices;

  bool operator==(const TransparencyReport&) const = default;
  // Plain-text rendering for the data subject.
  std::string render() const;
};

// Append-only audit log stored as newline-delimited JSON. Opening an
// existing file resumes its sequence; a gap or malformed line is an Error.
// One writer at a time; readers see a committed prefix.
class ComplianceLedger {
 public:
  // sync=true fsyncs every append before returning.
  ComplianceLedger(std::string path, Clock& clock, bool sync = true);
  ~ComplianceLedger();

  ComplianceLedger(const ComplianceLedger&) = delete;
  ComplianceLedger& operator=(const ComplianceLedger&) = delete;

  std::uint64_t record(const LedgerDraft& draft);
  std::uint64_t record_disclosure(const std::string& code, const std::string& beneficiary,
                                  const std::string& purpose, int retention_days);
  std::uint64_t record_erasure(const std::string& code);
  std::uint64_t record_consent(const std::string& code, std::optional<std::string> purpose,
                               bool minor);
  // One breach_notice per code, consecutive seqs. Empty input is a
  // ValidationError; every code is validated before anything is written.
  std::vector<std::uint64_t> record_breach(const std::vector<std::string>& affected_codes);

  std::vector<BeneficiaryRow> beneficiaries_of(const std::string& code) const;
  TransparencyReport transparency_report(const std::string& code) const;

  std::vector<LedgerEntry> entries() const;
  std::uint64_t last_seq() const;
  const std::string& path() const { return path_; }

 private:
  std::uint64_t append_locked(const LedgerDraft& draft);

  std::string path_;
  Clock& clock_;
  bool sync_;
  int fd_ = -1;
  mutable std::shared_mutex mu_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace twcrawl
