#include "twcrawl/analyzer.hpp"

#include <algorithm>
#include <boost/regex.hpp>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "twcrawl/csv.hpp"
#include "twcrawl/errors.hpp"

namespace twcrawl {

struct AnalysisSpec::Compiled {
  boost::regex re;
};

namespace {

std::shared_ptr<const AnalysisSpec::Compiled> compile(const std::string& pattern) {
  try {
    return std::make_shared<AnalysisSpec::Compiled>(
        AnalysisSpec::Compiled{boost::regex(pattern, boost::regex::perl)});
  } catch (const boost::regex_error& e) {
    throw RegexError(0, "cannot compile '" + pattern + "': " + e.what());
  }
}

const char* builtin_name(AnalysisKind kind) {
  switch (kind) {
    case AnalysisKind::builtin_lang:
      return "lang";
    case AnalysisKind::builtin_country:
      return "country";
    case AnalysisKind::builtin_hashtag:
      return "hashtag";
    case AnalysisKind::builtin_mention:
      return "mention";
    case AnalysisKind::regex:
      break;
  }
  throw std::invalid_argument("regex analyses have no builtin name");
}

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  }) && name != "." && name != "..";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<AnalysisRow> to_rows(const std::unordered_map<std::string, std::uint64_t>& counts) {
  std::vector<AnalysisRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, count] : counts) rows.push_back({key, count});
  sort_rows(rows);
  return rows;
}

}  // namespace

AnalysisSpec AnalysisSpec::builtin(AnalysisKind kind) {
  AnalysisSpec spec;
  spec.name = builtin_name(kind);
  spec.kind = kind;
  if (kind == AnalysisKind::builtin_hashtag) spec.compiled = compile(R"(#\w+)");
  if (kind == AnalysisKind::builtin_mention) spec.compiled = compile(R"(@\w+)");
  return spec;
}

AnalysisSpec AnalysisSpec::from_regex(std::string name, std::string pattern) {
  if (!valid_name(name)) throw std::invalid_argument("bad analysis name '" + name + "'");
  AnalysisSpec spec;
  spec.name = std::move(name);
  spec.kind = AnalysisKind::regex;
  spec.compiled = compile(pattern);
  spec.pattern = std::move(pattern);
  return spec;
}

std::vector<AnalysisSpec> builtin_specs() {
  return {AnalysisSpec::builtin(AnalysisKind::builtin_lang),
          AnalysisSpec::builtin(AnalysisKind::builtin_country),
          AnalysisSpec::builtin(AnalysisKind::builtin_hashtag),
          AnalysisSpec::builtin(AnalysisKind::builtin_mention)};
}

std::vector<AnalysisSpec> parse_regex_specs(std::string_view text) {
  std::vector<AnalysisSpec> specs;
  std::set<std::string> names = {"lang", "country", "hashtag", "mention"};
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'name: pattern'");
    std::string name = trim(std::string_view(line).substr(0, colon));
    std::string pattern = trim(std::string_view(line).substr(colon + 1));
    if (!valid_name(name)) throw ParseError(lineno, "bad analysis name '" + name + "'");
    if (pattern.empty()) throw ParseError(lineno, "empty pattern for '" + name + "'");
    if (!names.insert(name).second) throw ParseError(lineno, "duplicate analysis '" + name + "'");
    try {
      specs.push_back(AnalysisSpec::from_regex(std::move(name), std::move(pattern)));
    } catch (const RegexError& e) {
      throw RegexError(lineno, e.what());
    }
  }
  return specs;
}

std::vector<AnalysisSpec> load_regex_specs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open regex file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_regex_specs(ss.str());
}

void sort_rows(std::vector<AnalysisRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const AnalysisRow& a, const AnalysisRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
}

AnalysisResult analyze(const std::vector<ProcessedTweet>& records,
                       const std::vector<AnalysisSpec>& specs) {
  AnalysisResult result;
  for (const AnalysisSpec& spec : specs) {
    std::unordered_map<std::string, std::uint64_t> counts;
    switch (spec.kind) {
      case AnalysisKind::builtin_lang:
        for (const auto& r : records) ++counts[r.record.lang];
        break;
      case AnalysisKind::builtin_country:
        for (const auto& r : records) {
          if (r.country) ++counts[*r.country];
        }
        break;
      case AnalysisKind::builtin_hashtag:
      case AnalysisKind::builtin_mention:
        for (const auto& r : records) {
          const std::string& text = r.record.text;
          for (boost::sregex_iterator it(text.begin(), text.end(), spec.compiled->re), end;
               it != end; ++it) {
            ++counts[it->str()];
          }
        }
        break;
      case AnalysisKind::regex:
        for (const auto& r : records) {
          boost::smatch m;
          if (boost::regex_search(r.record.text, m, spec.compiled->re)) ++counts[m.str()];
        }
        break;
    }
    result[spec.name] = to_rows(counts);
  }
  return result;
}

std::string rows_to_csv(std::vector<AnalysisRow> rows) {
  sort_rows(rows);
  std::string out = "key,count\n";
  for (const AnalysisRow& row : rows) {
    out += csv::quote_field(row.key);
    out += ',';
    out += std::to_string(row.count);
    out += '\n';
  }
  return out;
}

std::vector<AnalysisRow> rows_from_csv(std::string_view text) {
  const auto table = csv::parse(text);
  if (table.empty() || table[0].size() != 2 || table[0][0] != "key" || table[0][1] != "count") {
    throw ParseError(1, "expected header 'key,count'");
  }
  std::vector<AnalysisRow> rows;
  rows.reserve(table.size() - 1);
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& t = table[i];
    if (t.size() != 2) throw ParseError(i + 1, "expected 2 columns");
    const std::string& c = t[1];
    if (c.empty() || !std::all_of(c.begin(), c.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      throw ParseError(i + 1, "count is not a non-negative integer");
    }
    try {
      rows.push_back({t[0], std::stoull(c)});
    } catch (const std::out_of_range&) {
      throw ParseError(i + 1, "count out of range");
    }
  }
  return rows;
}

std::string write_csv(const std::string& name, std::vector<AnalysisRow> rows,
                      const std::string& out_dir) {
  if (name.empty()) throw std::invalid_argument("analysis name must be non-empty");
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << rows_to_csv(std::move(rows));
  out.flush();
  if (!out) throw IoError("write failed for " + path);
  return path;
}

std::vector<AnalysisRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return rows_from_csv(ss.str());
}

}  // namespace twcrawl
