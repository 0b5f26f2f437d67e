#include "twcrawl/gazetteer.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "twcrawl/csv.hpp"
#include "twcrawl/errors.hpp"

namespace twcrawl {

extern const std::string_view kBundledGazetteerCsv;

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c); }

struct Token {
  std::string word;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    Token t{{}, i};
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
      t.word += lower(static_cast<unsigned char>(text[i]));
      ++i;
    }
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::size_t token_count(std::string_view normalized) {
  if (normalized.empty()) return 0;
  std::size_t n = 1;
  for (char c : normalized) n += c == ' ';
  return n;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string normalize_place(std::string_view text) {
  std::string out;
  for (const Token& t : tokenize(text)) {
    if (!out.empty()) out += ' ';
    out += t.word;
  }
  return out;
}

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const GazetteerEntry& e = entries_[i];
    if (normalize_place(e.city).empty() || normalize_place(e.country).empty()) {
      throw std::invalid_argument("gazetteer entry " + std::to_string(i + 1) +
                                  " needs a city and a country");
    }
    const std::string country = normalize_place(e.country);
    countries_.try_emplace(country, e.country);
    max_phrase_tokens_ = std::max(max_phrase_tokens_, token_count(country));

    auto add_city = [&](const std::string& phrase) {
      if (phrase.empty()) return;
      auto& slot = cities_[phrase];
      if (slot.empty() || slot.back() != i) slot.push_back(i);
      max_phrase_tokens_ = std::max(max_phrase_tokens_, token_count(phrase));
    };
    add_city(normalize_place(e.city));
    for (const std::string& alias : e.aliases) add_city(normalize_place(alias));
  }
}

Gazetteer Gazetteer::parse_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  std::vector<GazetteerEntry> entries;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && !row.empty() && trim(row[0]) == "city") continue;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() < 2 || row.size() > 3) {
      throw ParseError(r + 1, "expected city,country[,aliases]");
    }
    GazetteerEntry e{trim(row[0]), trim(row[1]), {}};
    if (e.city.empty() || e.country.empty()) throw ParseError(r + 1, "empty city or country");
    if (row.size() == 3) {
      std::string_view aliases = row[2];
      std::size_t start = 0;
      while (start <= aliases.size()) {
        const auto bar = aliases.find('|', start);
        std::string alias = trim(aliases.substr(
            start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
        if (!alias.empty()) e.aliases.push_back(std::move(alias));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
      }
    }
    entries.push_back(std::move(e));
  }
  return Gazetteer(std::move(entries));
}

Gazetteer Gazetteer::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gazetteer " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

const Gazetteer& Gazetteer::bundled() {
  static const Gazetteer g = parse_csv(kBundledGazetteerCsv);
  return g;
}

LocationMatch Gazetteer::detect(std::string_view free_text) const {
  const std::vector<Token> tokens = tokenize(free_text);

  // (length, offset) ordering: longer first, then earlier.
  struct Candidate {
    std::size_t length;
    std::size_t offset;
    const std::string* phrase;
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    return std::tie(b.length, a.offset) < std::tie(a.length, b.offset);
  };

  std::optional<Candidate> best_country;
  std::vector<Candidate> city_hits;
  std::deque<std::string> phrases;  // stable addresses for Candidate::phrase

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string phrase;
    for (std::size_t n = 0; n < max_phrase_tokens_ && i + n < tokens.size(); ++n) {
      if (n > 0) phrase += ' ';
      phrase += tokens[i + n].word;
      const bool is_country = countries_.contains(phrase);
      const bool is_city = cities_.contains(phrase);
      if (!is_country && !is_city) continue;
      phrases.push_back(phrase);
      const Candidate c{phrase.size(), tokens[i].offset, &phrases.back()};
      if (is_country && (!best_country || better(c, *best_country))) best_country = c;
      if (is_city) city_hits.push_back(c);
    }
  }

  LocationMatch result;
  std::optional<std::string> wanted_country;
  if (best_country) {
    wanted_country = countries_.at(*best_country->phrase);
    result.country = wanted_country;
  }

  std::optional<Candidate> best_city;
  std::size_t best_entry = 0;
  for (const Candidate& c : city_hits) {
    for (std::size_t idx : cities_.at(*c.phrase)) {
      if (wanted_country && entries_[idx].country != *wanted_country) continue;
      if (!best_city || better(c, *best_city) ||
          (!better(*best_city, c) && idx < best_entry)) {
        best_city = c;
        best_entry = idx;
      }
      break;  // first qualifying entry for this phrase wins
    }
  }
  if (best_city) {
    result.city = entries_[best_entry].city;
    result.country = entries_[best_entry].country;
  }
  return result;
}

LocationMatch detect_location(std::string_view free_text, const Gazetteer& gazetteer) {
  return gazetteer.detect(free_text);
}

}  // namespace twcrawl
