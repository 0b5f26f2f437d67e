#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace twcrawl {

struct GazetteerEntry {
  std::string city;
  std::string country;
  std::vector<std::string> aliases;
};

struct LocationMatch {
  std::optional<std::string> country;
  std::optional<std::string> city;

  bool operator==(const LocationMatch&) const = default;
};

// Lookup table for coarse location detection. Names match whole words,
// ignoring ASCII case and punctuation: "delhi,INDIA" matches "Delhi" and
// "India".
class Gazetteer {
 public:
  // Throws std::invalid_argument on an empty city or country.
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  // CSV with header city,country,aliases; aliases are "|"-separated.
  static Gazetteer parse_csv(std::string_view text);
  static Gazetteer load_csv(const std::string& path);
  // The fixture compiled into the library.
  static const Gazetteer& bundled();

  const std::vector<GazetteerEntry>& entries() const { return entries_; }
  std::size_t country_count() const { return countries_.size(); }

  // A country mention is resolved first; cities are then only accepted from
  // that country. Without a country, the best city supplies both. Among
  // candidates the longest name wins, then the earliest position, then the
  // earliest gazetteer entry.
  LocationMatch detect(std::string_view free_text) const;

 private:
  std::vector<GazetteerEntry> entries_;
  // normalized phrase -> canonical country name
  std::unordered_map<std::string, std::string> countries_;
  // normalized phrase -> entry indices in gazetteer order
  std::unordered_map<std::string, std::vector<std::size_t>> cities_;
  std::size_t max_phrase_tokens_ = 1;
};

LocationMatch detect_location(std::string_view free_text, const Gazetteer& gazetteer);

// Lowercased words joined by single spaces. Bytes >= 0x80 count as letters so
// UTF-8 names survive.
std::string normalize_place(std::string_view text);

}  // namespace twcrawl
