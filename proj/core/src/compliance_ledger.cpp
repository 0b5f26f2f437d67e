#include "twcrawl/compliance_ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

using nlohmann::ordered_json;

bool is_code(std::string_view s) {
  if (s.size() != 32) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void write_all(int fd, std::string_view data, const std::string& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write to " + path + " failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(LedgerEvent e) {
  switch (e) {
    case LedgerEvent::disclosure:
      return "disclosure";
    case LedgerEvent::erasure:
      return "erasure";
    case LedgerEvent::consent:
      return "consent";
    case LedgerEvent::breach_notice:
      return "breach_notice";
  }
  return "unknown";
}

std::optional<LedgerEvent> parse_ledger_event(std::string_view s) {
  for (auto e : {LedgerEvent::disclosure, LedgerEvent::erasure, LedgerEvent::consent,
                 LedgerEvent::breach_notice}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::string serialize_entry(const LedgerEntry& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["event"] = to_string(e.event);
  j["subject_code"] = e.subject_code;
  if (e.beneficiary) j["beneficiary"] = *e.beneficiary;
  if (e.purpose) j["purpose"] = *e.purpose;
  if (e.retention_days) j["retention_days"] = *e.retention_days;
  j["at"] = format_iso8601(e.at);
  if (e.minor) j["minor"] = *e.minor;
  return j.dump();
}

LedgerEntry parse_entry(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    LedgerEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto event = parse_ledger_event(j.at("event").get<std::string>());
    if (!event) throw Error("unknown ledger event");
    e.event = *event;
    e.subject_code = j.at("subject_code").get<std::string>();
    if (j.contains("beneficiary")) e.beneficiary = j["beneficiary"].get<std::string>();
    if (j.contains("purpose")) e.purpose = j["purpose"].get<std::string>();
    if (j.contains("retention_days")) e.retention_days = j["retention_days"].get<int>();
    const auto at = parse_iso8601(j.at("at").get<std::string>());
    if (!at) throw Error("bad ledger timestamp");
    e.at = *at;
    if (j.contains("minor")) e.minor = j["minor"].get<bool>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("malformed ledger entry: ") + ex.what());
  }
}

void validate_draft(const LedgerDraft& d) {
  if (!is_code(d.subject_code)) {
    throw ValidationError("subject must be a 32-hex-digit pseudonym code");
  }
  if (d.retention_days && *d.retention_days <= 0) {
    throw ValidationError("retention_days must be positive");
  }
  if (d.minor && d.event != LedgerEvent::consent) {
    throw ValidationError("minor flag only applies to consent entries");
  }
  if (d.event == LedgerEvent::disclosure) {
    if (!d.beneficiary || d.beneficiary->empty()) {
      throw ValidationError("disclosure requires a beneficiary");
    }
    if (!d.purpose || d.purpose->empty()) throw ValidationError("disclosure requires a purpose");
    if (!d.retention_days) throw ValidationError("disclosure requires retention_days");
  }
}

std::string TransparencyReport::render() const {
  std::ostringstream out;
  out << "Transparency report for " << code << "\n";
  out << "\nDisclosures (" << disclosures.size() << ")\n";
  for (const auto& e : disclosures) {
    out << "  #" << e.seq << " " << format_iso8601(e.at) << " shared with "
        << e.beneficiary.value_or("?") << " for " << e.purpose.value_or("?") << ", retained for "
        << e.retention_days.value_or(0) << " days\n";
  }
  out << "\nErasures (" << erasures.size() << ")\n";
  for (const auto& e : erasures) {
    out << "  #" << e.seq << " " << format_iso8601(e.at) << " identity binding erased\n";
  }
  out << "\nConsents (" << consents.size() << ")\n";
  for (const auto& e : consents) {
    out << "  #" << e.seq << " " << format_iso8601(e.at) << " consent given";
    if (e.purpose) out << " for " << *e.purpose;
    if (e.minor.value_or(false)) out << " (minor)";
    out << "\n";
  }
  out << "\nBreach notices (" << breach_notices.size() << ")\n";
  for (const auto& e : breach_notices) {
    out << "  #" << e.seq << " " << format_iso8601(e.at) << " your data was affected by a breach";
    if (e.purpose) out << ": " << *e.purpose;
    out << "\n";
  }
  return out.str();
}

ComplianceLedger::ComplianceLedger(std::string path, Clock& clock, bool sync)
    : path_(std::move(path)), clock_(clock), sync_(sync) {
  const std::filesystem::path p(path_);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  if (std::filesystem::exists(p)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot read ledger " + path_);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string content = ss.str();
    if (!content.empty() && content.back() != '\n') {
      throw Error("ledger " + path_ + " ends with a partial entry");
    }
    std::size_t start = 0;
    while (start < content.size()) {
      const std::size_t end = content.find('\n', start);
      LedgerEntry e = parse_entry(std::string_view(content).substr(start, end - start));
      try {
        validate_draft({e.event, e.subject_code, e.beneficiary, e.purpose, e.retention_days, e.minor});
      } catch (const ValidationError& v) {
        throw Error("ledger " + path_ + " entry " + std::to_string(e.seq) + " is invalid: " + v.what());
      }
      if (e.seq != entries_.size() + 1) {
        throw Error("ledger " + path_ + " has a sequence gap at entry " +
                    std::to_string(entries_.size() + 1));
      }
      entries_.push_back(std::move(e));
      start = end + 1;
    }
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open ledger " + path_ + ": " + std::strerror(errno));
}

ComplianceLedger::~ComplianceLedger() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t ComplianceLedger::append_locked(const LedgerDraft& draft) {
  LedgerEntry e;
  e.seq = entries_.size() + 1;
  e.event = draft.event;
  e.subject_code = draft.subject_code;
  e.beneficiary = draft.beneficiary;
  e.purpose = draft.purpose;
  e.retention_days = draft.retention_days;
  e.minor = draft.minor;
  e.at = clock_.now();
  write_all(fd_, serialize_entry(e) + "\n", path_);
  if (sync_ && ::fsync(fd_) != 0) {
    throw IoError("fsync of " + path_ + " failed: " + std::strerror(errno));
  }
  entries_.push_back(std::move(e));
  return entries_.back().seq;
}

std::uint64_t ComplianceLedger::record(const LedgerDraft& draft) {
  validate_draft(draft);
  std::unique_lock lock(mu_);
  return append_locked(draft);
}

std::uint64_t ComplianceLedger::record_disclosure(const std::string& code,
                                                  const std::string& beneficiary,
                                                  const std::string& purpose, int retention_days) {
  return record({LedgerEvent::disclosure, code, beneficiary, purpose, retention_days, std::nullopt});
}

std::uint64_t ComplianceLedger::record_erasure(const std::string& code) {
  return record({LedgerEvent::erasure, code, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
}

std::uint64_t ComplianceLedger::record_consent(const std::string& code,
                                               std::optional<std::string> purpose, bool minor) {
  return record({LedgerEvent::consent, code, std::nullopt, std::move(purpose), std::nullopt, minor});
}

std::vector<std::uint64_t> ComplianceLedger::record_breach(
    const std::vector<std::string>& affected_codes) {
  if (affected_codes.empty()) throw ValidationError("breach notice needs at least one code");
  std::vector<LedgerDraft> drafts;
  drafts.reserve(affected_codes.size());
  for (const std::string& code : affected_codes) {
    LedgerDraft d{LedgerEvent::breach_notice, code, std::nullopt, std::nullopt, std::nullopt,
                  std::nullopt};
    validate_draft(d);
    drafts.push_back(std::move(d));
  }
  std::unique_lock lock(mu_);
  std::vector<std::uint64_t> seqs;
  seqs.reserve(drafts.size());
  for (const auto& d : drafts) seqs.push_back(append_locked(d));
  return seqs;
}

std::vector<BeneficiaryRow> ComplianceLedger::beneficiaries_of(const std::string& code) const {
  std::shared_lock lock(mu_);
  std::vector<BeneficiaryRow> rows;
  for (const LedgerEntry& e : entries_) {
    if (e.event != LedgerEvent::disclosure || e.subject_code != code) continue;
    rows.push_back({*e.beneficiary, *e.purpose, *e.retention_days, e.at});
  }
  return rows;
}

TransparencyReport ComplianceLedger::transparency_report(const std::string& code) const {
  std::shared_lock lock(mu_);
  TransparencyReport report;
  report.code = code;
  for (const LedgerEntry& e : entries_) {
    if (e.subject_code != code) continue;
    switch (e.event) {
      case LedgerEvent::disclosure:
        report.disclosures.push_back(e);
        break;
      case LedgerEvent::erasure:
        report.erasures.push_back(e);
        break;
      case LedgerEvent::consent:
        report.consents.push_back(e);
        break;
      case LedgerEvent::breach_notice:
        report.breach_notices.push_back(e);
        break;
    }
  }
  return report;
}

std::vector<LedgerEntry> ComplianceLedger::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

std::uint64_t ComplianceLedger::last_seq() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

}  // namespace twcrawl
