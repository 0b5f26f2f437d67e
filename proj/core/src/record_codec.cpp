#include "twcrawl/record_codec.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

std::array<const std::string*, kRecordFieldCount> fields_of(const TweetRecord& r) {
  return {&r.creation_date, &r.id, &r.lang, &r.location, &r.name, &r.username, &r.text};
}

constexpr std::array<std::string_view, kRecordFieldCount> kFieldNames = {
    "creation_date", "id", "lang", "location", "name", "username", "text"};

std::vector<std::string_view> split_on_delimiter(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(kFieldDelimiter, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + kFieldDelimiter.size();
  }
}

// True when every delimiter has a space on both sides, i.e. the line is in the
// " <8> " form. Inner parts need two spaces of their own to qualify.
bool is_spaced_form(const std::vector<std::string_view>& parts) {
  const std::size_t last = parts.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const std::string_view p = parts[i];
    const bool needs_front = i > 0;
    const bool needs_back = i < last;
    if (p.size() < static_cast<std::size_t>(needs_front) + static_cast<std::size_t>(needs_back)) {
      return false;
    }
    if (needs_front && p.front() != ' ') return false;
    if (needs_back && p.back() != ' ') return false;
  }
  return true;
}

std::string join(const TweetRecord& r, std::string_view delimiter) {
  std::string out;
  bool first = true;
  for (const std::string* f : fields_of(r)) {
    if (!first) out += delimiter;
    out += *f;
    first = false;
  }
  return out;
}

std::string hour_token(int hour) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d %s", hour, hour < 12 ? "AM" : "PM");
  return buf;
}

std::string date_token(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02u-%02u-%04d", static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()), static_cast<int>(d.year()));
  return buf;
}

void check_locator(const FileLocator& loc, FileKind expected) {
  if (loc.kind != expected) throw std::invalid_argument("file locator has the wrong kind");
  if (loc.hour < 0 || loc.hour > 23) throw std::invalid_argument("hour outside [0, 23]");
  if (!loc.date.ok()) throw std::invalid_argument("invalid calendar date");
}

std::string with_root(std::string_view root, const std::string& rest) {
  std::string out(root);
  if (!out.empty() && out.back() != '/') out += '/';
  out += rest;
  return out;
}

template <typename Int>
bool parse_digits(std::string_view s, Int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<std::string> record_violation(const TweetRecord& r) {
  const auto fields = fields_of(r);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& f = *fields[i];
    if (f.find(kFieldDelimiter) != std::string::npos) {
      return std::string(kFieldNames[i]) + " contains the field delimiter";
    }
    if (f.find_first_of("\r\n") != std::string::npos) {
      return std::string(kFieldNames[i]) + " contains a line break";
    }
  }
  if (r.id.empty()) return "id is empty";
  for (char c : r.id) {
    if (c < '0' || c > '9') return "id is not all decimal digits";
  }
  return std::nullopt;
}

std::string sanitize_field(std::string_view raw) {
  std::string flat;
  flat.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '\r') {
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
      flat += ' ';
    } else if (c == '\n') {
      flat += ' ';
    } else {
      flat += c;
    }
  }
  std::string out;
  out.reserve(flat.size());
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = flat.find(kFieldDelimiter, start);
    if (pos == std::string::npos) break;
    out.append(flat, start, pos - start);
    out += "<8 >";
    start = pos + kFieldDelimiter.size();
  }
  out.append(flat, start, std::string::npos);
  return out;
}

std::string encode_record(const TweetRecord& r) {
  if (auto v = record_violation(r)) throw InvalidRecordError("cannot encode record: " + *v);
  std::string bare = join(r, kFieldDelimiter);
  // A bare line that happens to look spaced would lose a space per side on
  // decode; the spaced form is unambiguous for it.
  if (is_spaced_form(split_on_delimiter(bare))) return join(r, " <8> ");
  return bare;
}

TweetRecord decode_record(std::string_view line) {
  std::vector<std::string_view> parts = split_on_delimiter(line);
  if (parts.size() != kRecordFieldCount) throw FieldCountError(parts.size());
  if (is_spaced_form(parts)) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) parts[i].remove_prefix(1);
      if (i + 1 < parts.size()) parts[i].remove_suffix(1);
    }
  }
  return TweetRecord{std::string(parts[0]), std::string(parts[1]), std::string(parts[2]),
                     std::string(parts[3]), std::string(parts[4]), std::string(parts[5]),
                     std::string(parts[6])};
}

std::string crawl_file_path(const FileLocator& loc, std::string_view root) {
  check_locator(loc, FileKind::crawl);
  return with_root(root, date_token(loc.date) + "/tweets-" + hour_token(loc.hour) + ".txt");
}

std::string processed_file_path(const FileLocator& loc, std::string_view root) {
  check_locator(loc, FileKind::processed);
  return with_root(root, date_token(loc.date) + "-tweets-" + hour_token(loc.hour) + ".json");
}

std::optional<FileLocator> parse_crawl_file_path(std::string_view path) {
  const std::size_t slash = path.rfind('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const std::string_view file = path.substr(slash + 1);
  const std::string_view dirs = path.substr(0, slash);
  const std::size_t dir_slash = dirs.rfind('/');
  const std::string_view dir =
      dir_slash == std::string_view::npos ? dirs : dirs.substr(dir_slash + 1);

  // MM-DD-YYYY
  if (dir.size() != 10 || dir[2] != '-' || dir[5] != '-') return std::nullopt;
  unsigned mo = 0, d = 0;
  int y = 0;
  if (!parse_digits(dir.substr(0, 2), mo) || !parse_digits(dir.substr(3, 2), d) ||
      !parse_digits(dir.substr(6, 4), y)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{mo},
                                         std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;

  // tweets-HH XM.txt
  constexpr std::string_view prefix = "tweets-";
  constexpr std::string_view suffix = ".txt";
  if (file.size() != prefix.size() + 5 + suffix.size() || !file.starts_with(prefix) ||
      !file.ends_with(suffix)) {
    return std::nullopt;
  }
  const std::string_view hour_part = file.substr(prefix.size(), 5);
  int hour = 0;
  if (hour_part[2] != ' ' || !parse_digits(hour_part.substr(0, 2), hour) || hour > 23) {
    return std::nullopt;
  }
  if (hour_part.substr(3) != (hour < 12 ? "AM" : "PM")) return std::nullopt;
  return FileLocator{date, hour, FileKind::crawl};
}

}  // namespace twcrawl
