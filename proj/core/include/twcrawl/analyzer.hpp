#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twcrawl/processor.hpp"

namespace twcrawl {

enum class AnalysisKind { builtin_lang, builtin_country, builtin_hashtag, builtin_mention, regex };

struct AnalysisSpec {
  std::string name;
  AnalysisKind kind = AnalysisKind::regex;
  std::optional<std::string> pattern;

  // Compiles pattern (Perl syntax). Throws std::invalid_argument when the
  // pattern/kind pairing is wrong, RegexError (line 0) when it won't compile.
  static AnalysisSpec builtin(AnalysisKind kind);
  static AnalysisSpec from_regex(std::string name, std::string pattern);

  struct Compiled;
  std::shared_ptr<const Compiled> compiled;
};

struct AnalysisRow {
  std::string key;
  std::uint64_t count = 0;

  bool operator==(const AnalysisRow&) const = default;
};

using AnalysisResult = std::map<std::string, std::vector<AnalysisRow>>;

// lang, country, hashtag, mention.
std::vector<AnalysisSpec> builtin_specs();

// "name: pattern" per line; blank lines and lines starting with '#' are
// skipped. Throws IoError, ParseError or RegexError with the 1-based line.
std::vector<AnalysisSpec> load_regex_specs(const std::string& path);
std::vector<AnalysisSpec> parse_regex_specs(std::string_view text);

// Rows come back in descending count order, ties by key.
AnalysisResult analyze(const std::vector<ProcessedTweet>& records,
                       const std::vector<AnalysisSpec>& specs);

// Orders rows by count descending, then key ascending.
void sort_rows(std::vector<AnalysisRow>& rows);

// "<out_dir>/<name>.csv" with header "key,count".
std::string write_csv(const std::string& name, std::vector<AnalysisRow> rows,
                      const std::string& out_dir);
std::string rows_to_csv(std::vector<AnalysisRow> rows);
// Throws ParseError for a wrong header, arity or non-numeric count.
std::vector<AnalysisRow> rows_from_csv(std::string_view text);
std::vector<AnalysisRow> read_csv(const std::string& path);

}  // namespace twcrawl
