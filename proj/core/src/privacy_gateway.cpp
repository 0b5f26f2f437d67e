#include "twcrawl/privacy_gateway.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <set>
#include <sstream>

#include "twcrawl/errors.hpp"

namespace twcrawl {

extern const std::string_view kBundledCategoryRules;

namespace {

constexpr std::array<std::string_view, 5> kVulnerableFields = {"name", "username", "id",
                                                               "location", "city"};
constexpr std::array<std::string_view, 4> kInvulnerableFields = {"lang", "country",
                                                                 "creation_date", "text"};

// Placeholders use no handle characters, so they can never spell one.
constexpr std::string_view kRedacted = "***";

bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Calls fn(lineno, key, value) for each "key: value" line, skipping blanks
// and # comments.
template <typename Fn>
void for_each_keyed_line(std::string_view text, Fn fn) {
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
    fn(lineno, trim(std::string_view(line).substr(0, colon)),
       trim(std::string_view(line).substr(colon + 1)));
  }
}

}  // namespace

// ---- sensitivity ---------------------------------------------------------

std::string_view to_string(Sensitivity s) {
  return s == Sensitivity::vulnerable ? "vulnerable" : "invulnerable";
}

std::string_view to_string(Threat t) {
  switch (t) {
    case Threat::threat_intelligence:
      return "threat_intelligence";
    case Threat::targeted_advertising:
      return "targeted_advertising";
    case Threat::preference_manipulation:
      return "preference_manipulation";
  }
  return "unknown";
}

std::optional<Threat> parse_threat(std::string_view s) {
  for (auto t : {Threat::threat_intelligence, Threat::targeted_advertising,
                 Threat::preference_manipulation}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

SensitivityPolicy SensitivityPolicy::parse(std::string_view text) {
  SensitivityPolicy policy;
  for_each_keyed_line(text, [&](std::size_t lineno, const std::string& field,
                                const std::string& value) {
    if (std::find(kVulnerableFields.begin(), kVulnerableFields.end(), field) ==
        kVulnerableFields.end()) {
      throw ParseError(lineno, "'" + field + "' is not a vulnerable field");
    }
    const auto threat = parse_threat(value);
    if (!threat) throw ParseError(lineno, "unknown threat '" + value + "'");
    policy.overrides_[field] = *threat;
  });
  return policy;
}

SensitivityPolicy SensitivityPolicy::load(const std::string& path) { return parse(read_text(path)); }

SensitivityLabel SensitivityPolicy::classify(std::string_view field_name) const {
  if (std::find(kVulnerableFields.begin(), kVulnerableFields.end(), field_name) !=
      kVulnerableFields.end()) {
    const auto it = overrides_.find(field_name);
    return {std::string(field_name), Sensitivity::vulnerable,
            it != overrides_.end() ? it->second : Threat::targeted_advertising};
  }
  if (std::find(kInvulnerableFields.begin(), kInvulnerableFields.end(), field_name) !=
      kInvulnerableFields.end()) {
    return {std::string(field_name), Sensitivity::invulnerable, std::nullopt};
  }
  throw UnknownFieldError("unknown field '" + std::string(field_name) + "'");
}

SensitivityLabel classify_sensitivity(std::string_view field_name, const SensitivityPolicy& policy) {
  return policy.classify(field_name);
}

// ---- categories ----------------------------------------------------------

std::string_view to_string(Category c) {
  switch (c) {
    case Category::ecommerce:
      return "ecommerce";
    case Category::demographic_social:
      return "demographic_social";
    case Category::food:
      return "food";
    case Category::travel:
      return "travel";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto c : {Category::ecommerce, Category::demographic_social, Category::food,
                 Category::travel}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

CategoryRules CategoryRules::parse(std::string_view text) {
  CategoryRules rules;
  for_each_keyed_line(text, [&](std::size_t lineno, const std::string& key,
                                const std::string& value) {
    const auto category = parse_category(key);
    if (!category) throw ParseError(lineno, "unknown category '" + key + "'");
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto bar = value.find('|', start);
      const std::string kw = lower_ascii(trim(std::string_view(value).substr(
          start, bar == std::string::npos ? std::string::npos : bar - start)));
      if (!kw.empty()) {
        if (!std::all_of(kw.begin(), kw.end(), [](unsigned char c) { return word_byte(c); })) {
          throw ParseError(lineno, "keyword '" + kw + "' must be a single word");
        }
        auto& cats = rules.keyword_to_categories_[kw];
        if (std::find(cats.begin(), cats.end(), *category) == cats.end()) cats.push_back(*category);
      }
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
  });
  return rules;
}

CategoryRules CategoryRules::load(const std::string& path) { return parse(read_text(path)); }

const CategoryRules& CategoryRules::bundled() {
  static const CategoryRules rules = parse(kBundledCategoryRules);
  return rules;
}

std::vector<Category> CategoryRules::classify(std::string_view text) const {
  std::set<Category> hits;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !word_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    const auto it = keyword_to_categories_.find(lower_ascii(text.substr(start, i - start)));
    if (it != keyword_to_categories_.end()) hits.insert(it->second.begin(), it->second.end());
  }
  if (hits.empty()) return {Category::demographic_social};
  return {hits.begin(), hits.end()};
}

// ---- bundles -------------------------------------------------------------

std::string CategoryBundle::to_json() const {
  nlohmann::ordered_json j = {{"code", code},
                              {"category", to_string(category)},
                              {"text", text},
                              {"lang", lang},
                              {"country", country ? nlohmann::ordered_json(*country) : nullptr},
                              {"creation_date", creation_date}};
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string redact_text(std::string_view text, std::span<const std::string> identifiers) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '@' && i + 1 < text.size() && word_byte(static_cast<unsigned char>(text[i + 1]))) {
      out += "@_";
      ++i;
      while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      out += text[i++];
    }
  }
  for (const std::string& id : identifiers) {
    if (id.size() < 4) continue;
    const std::string needle = lower_ascii(id);
    std::string lowered = lower_ascii(out);
    std::size_t pos = lowered.find(needle);
    while (pos != std::string::npos) {
      out.replace(pos, needle.size(), kRedacted);
      lowered = lower_ascii(out);
      pos = lowered.find(needle, pos + kRedacted.size());
    }
  }
  return out;
}

// ---- services ------------------------------------------------------------

DirectorySink::DirectorySink(std::string name, std::string dir)
    : name_(std::move(name)), dir_(std::move(dir)) {}

std::string DirectorySink::file() const {
  return (std::filesystem::path(dir_) / "bundles.jsonl").string();
}

void DirectorySink::deliver(const std::string& bundle_json) {
  std::filesystem::create_directories(dir_);
  std::ofstream out(file(), std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open sink " + file());
  out << bundle_json << '\n';
  out.flush();
  if (!out) throw IoError("write failed for sink " + file());
}

HttpSink::HttpSink(std::string name, std::string url) : name_(std::move(name)), url_(std::move(url)) {}

void HttpSink::deliver(const std::string& bundle_json) {
  const auto scheme = url_.find("://");
  const auto slash = url_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string base = slash == std::string::npos ? url_ : url_.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url_.substr(slash);
  httplib::Client client(base);
  client.set_connection_timeout(5);
  auto res = client.Post(path, bundle_json, "application/json");
  if (!res) throw NetworkError("POST " + url_ + " failed: " + httplib::to_string(res.error()));
  if (res->status / 100 != 2) {
    throw Error("POST " + url_ + " returned HTTP " + std::to_string(res->status));
  }
}

void ServiceRegistry::add(Category category, std::shared_ptr<ServiceSink> sink) {
  sinks_[category] = std::move(sink);
}

ServiceSink* ServiceRegistry::find(Category category) const {
  const auto it = sinks_.find(category);
  return it == sinks_.end() ? nullptr : it->second.get();
}

ServiceRegistry ServiceRegistry::parse(std::string_view text) {
  ServiceRegistry registry;
  for_each_keyed_line(text, [&](std::size_t lineno, const std::string& key,
                                const std::string& value) {
    const auto category = parse_category(key);
    if (!category) throw ParseError(lineno, "unknown category '" + key + "'");
    if (value.empty()) throw ParseError(lineno, "missing sink for '" + key + "'");
    std::string name = value;
    std::string target = value;
    // name=target, unless the '=' belongs to a URL query.
    if (const auto eq = value.find('='); eq != std::string::npos &&
                                         value.substr(0, eq).find("://") == std::string::npos &&
                                         value.substr(0, eq).find('/') == std::string::npos) {
      name = trim(std::string_view(value).substr(0, eq));
      target = trim(std::string_view(value).substr(eq + 1));
      if (name.empty() || target.empty()) throw ParseError(lineno, "expected name=target");
    }
    if (target.starts_with("http://") || target.starts_with("https://")) {
      registry.add(*category, std::make_shared<HttpSink>(name, target));
    } else {
      registry.add(*category, std::make_shared<DirectorySink>(name, target));
    }
  });
  return registry;
}

ServiceRegistry ServiceRegistry::load(const std::string& path) { return parse(read_text(path)); }

// ---- gateway -------------------------------------------------------------

PrivacyGateway::PrivacyGateway(PseudonymVault& vault, ComplianceLedger& ledger, CategoryRules rules,
                               GatewayOptions options)
    : vault_(vault), ledger_(ledger), rules_(std::move(rules)), options_(std::move(options)) {}

std::vector<CategoryBundle> PrivacyGateway::pseudonymize(const ProcessedTweet& t) {
  const TweetRecord& r = t.record;
  const std::array<std::string, 3> identifiers = {r.username, r.name, r.id};
  const std::string code = vault_.register_user(user_key_of(r), identifiers);
  const std::string text = redact_text(r.text, identifiers);

  std::vector<CategoryBundle> bundles;
  for (Category c : rules_.classify(r.text)) {
    bundles.push_back(CategoryBundle{code, c, text, r.lang, t.country, r.creation_date});
  }
  return bundles;
}

DeliveryReceipt PrivacyGateway::dispatch(const CategoryBundle& bundle,
                                         const ServiceRegistry& registry) {
  ServiceSink* sink = registry.find(bundle.category);
  if (!sink) {
    throw NoServiceForCategoryError("no service registered for " +
                                    std::string(to_string(bundle.category)));
  }
  if (!vault_.contains_code(bundle.code)) {
    throw UnknownCodeError("bundle code was not issued by the vault");
  }
  std::lock_guard lock(dispatch_mu_);
  sink->deliver(bundle.to_json());
  const auto seq = ledger_.record_disclosure(bundle.code, sink->name(), options_.purpose,
                                             options_.retention_days);
  return {sink->name(), bundle.category, seq};
}

std::pair<std::string, std::string> PrivacyGateway::remap(const Recommendation& rec) const {
  return {vault_.owner_of(rec.code), rec.item};
}

ErasureReport PrivacyGateway::erase_user(const std::string& user_key) {
  const std::string code = vault_.erase(user_key);
  return {code, ledger_.record_erasure(code)};
}

}  // namespace twcrawl
