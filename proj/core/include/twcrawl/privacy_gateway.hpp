#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twcrawl/compliance_ledger.hpp"
#include "twcrawl/processor.hpp"
#include "twcrawl/pseudonym_vault.hpp"

namespace twcrawl {

// ---- sensitivity ---------------------------------------------------------

enum class Sensitivity { vulnerable, invulnerable };
enum class Threat { threat_intelligence, targeted_advertising, preference_manipulation };

std::string_view to_string(Sensitivity s);
std::string_view to_string(Threat t);
std::optional<Threat> parse_threat(std::string_view s);

struct SensitivityLabel {
  std::string field_name;
  Sensitivity label = Sensitivity::invulnerable;
  std::optional<Threat> threat;  // only for vulnerable fields

  bool operator==(const SensitivityLabel&) const = default;
};

// Which misuse channel each vulnerable field is tagged with. Defaults to
// targeted_advertising; a policy file of "field: threat" lines overrides.
class SensitivityPolicy {
 public:
  SensitivityPolicy() = default;
  static SensitivityPolicy parse(std::string_view text);
  static SensitivityPolicy load(const std::string& path);

  // Throws UnknownFieldError for names outside the processed-tweet schema.
  SensitivityLabel classify(std::string_view field_name) const;

 private:
  std::map<std::string, Threat, std::less<>> overrides_;
};

SensitivityLabel classify_sensitivity(std::string_view field_name,
                                      const SensitivityPolicy& policy = {});

// ---- categories ----------------------------------------------------------

enum class Category { ecommerce, demographic_social, food, travel };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

// Keyword rules, one "category: keyword|keyword|..." line per category.
// A tweet belongs to every category with a keyword among its words;
// with none it falls back to demographic_social.
class CategoryRules {
 public:
  static CategoryRules parse(std::string_view text);
  static CategoryRules load(const std::string& path);
  static const CategoryRules& bundled();

  // Distinct categories in enum order.
  std::vector<Category> classify(std::string_view text) const;

 private:
  std::map<std::string, std::vector<Category>, std::less<>> keyword_to_categories_;
};

// ---- bundles -------------------------------------------------------------

// What a recommendation service gets to see: the pseudonym plus the
// invulnerable fields.
struct CategoryBundle {
  std::string code;
  Category category = Category::demographic_social;
  std::string text;
  std::string lang;
  std::optional<std::string> country;
  std::string creation_date;

  bool operator==(const CategoryBundle&) const = default;
  std::string to_json() const;
};

// Text with @mentions reduced to "@_" and the author's own identifiers
// (4+ characters, any case) replaced by "***".
std::string redact_text(std::string_view text, std::span<const std::string> identifiers);

struct Recommendation {
  std::string code;
  Category category = Category::demographic_social;
  std::string item;
};

// ---- services ------------------------------------------------------------

class ServiceSink {
 public:
  virtual ~ServiceSink() = default;
  // Beneficiary name recorded in the ledger.
  virtual std::string name() const = 0;
  // Throws on delivery failure.
  virtual void deliver(const std::string& bundle_json) = 0;
};

// Appends one JSON bundle per line to <dir>/bundles.jsonl.
class DirectorySink final : public ServiceSink {
 public:
  DirectorySink(std::string name, std::string dir);
  std::string name() const override { return name_; }
  void deliver(const std::string& bundle_json) override;
  std::string file() const;

 private:
  std::string name_;
  std::string dir_;
};

// POSTs each bundle as application/json.
class HttpSink final : public ServiceSink {
 public:
  HttpSink(std::string name, std::string url);
  std::string name() const override { return name_; }
  void deliver(const std::string& bundle_json) override;

 private:
  std::string name_;
  std::string url_;
};

// Keeps deliveries in memory.
class MemorySink final : public ServiceSink {
 public:
  explicit MemorySink(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  void deliver(const std::string& bundle_json) override {
    std::lock_guard lock(mu_);
    delivered_.push_back(bundle_json);
  }
  std::vector<std::string> delivered() const {
    std::lock_guard lock(mu_);
    return delivered_;
  }

 private:
  std::string name_;
  mutable std::mutex mu_;
  std::vector<std::string> delivered_;
};

class ServiceRegistry {
 public:
  void add(Category category, std::shared_ptr<ServiceSink> sink);
  ServiceSink* find(Category category) const;

  // "category: [name=]target" lines; http(s):// targets become HttpSink,
  // anything else a DirectorySink. The name defaults to the target.
  static ServiceRegistry parse(std::string_view text);
  static ServiceRegistry load(const std::string& path);

 private:
  std::map<Category, std::shared_ptr<ServiceSink>> sinks_;
};

// ---- gateway -------------------------------------------------------------

struct DeliveryReceipt {
  std::string sink;
  Category category = Category::demographic_social;
  std::uint64_t ledger_seq = 0;
};

struct ErasureReport {
  std::string code;
  std::uint64_t ledger_seq = 0;
};

struct GatewayOptions {
  std::string purpose = "recommendation";
  int retention_days = 30;
};

// Sits between crawled data and recommendation services: swaps identities
// for vault codes, releases only invulnerable fields, logs every
// disclosure, and maps recommendations back to their owners.
class PrivacyGateway {
 public:
  PrivacyGateway(PseudonymVault& vault, ComplianceLedger& ledger, CategoryRules rules,
                 GatewayOptions options = {});

  // The identity key for a record's author.
  static std::string user_key_of(const TweetRecord& r) { return r.username; }

  // One bundle per matched category. Registers the author if needed.
  std::vector<CategoryBundle> pseudonymize(const ProcessedTweet& t);

  // Delivers to the category's sink and records the disclosure under one
  // lock. Throws NoServiceForCategoryError, or UnknownCodeError for a code
  // the vault did not issue.
  DeliveryReceipt dispatch(const CategoryBundle& bundle, const ServiceRegistry& registry);

  // (user_key, item). Throws UnknownCodeError for stale or erased codes.
  std::pair<std::string, std::string> remap(const Recommendation& rec) const;

  // Throws UnknownUserError.
  ErasureReport erase_user(const std::string& user_key);

 private:
  PseudonymVault& vault_;
  ComplianceLedger& ledger_;
  CategoryRules rules_;
  GatewayOptions options_;
  std::mutex dispatch_mu_;
};

}  // namespace twcrawl
