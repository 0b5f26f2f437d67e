#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace twcrawl {

inline constexpr std::string_view kFieldDelimiter = "<8>";
inline constexpr std::size_t kRecordFieldCount = 7;

// One crawled tweet as persisted on disk. creation_date is kept verbatim as
// the API sent it; the codec never interprets it.
struct TweetRecord {
  std::string creation_date;
  std::string id;
  std::string lang;
  std::string location;
  std::string name;
  std::string username;
  std::string text;

  bool operator==(const TweetRecord&) const = default;
};

// Empty when r is storable, otherwise a description of the first violation.
std::optional<std::string> record_violation(const TweetRecord& r);

// Makes an arbitrary string storable as a field: CR, LF and CRLF each become
// one space, then every "<8>" becomes "<8 >". Idempotent.
std::string sanitize_field(std::string_view raw);

// Joins the seven fields with "<8>". Throws InvalidRecordError when the record
// breaks an invariant (run sanitize_field over the fields first).
std::string encode_record(const TweetRecord& r);

// Inverse of encode_record. Also accepts the spaced " <8> " form when every
// delimiter in the line carries a space on both sides. Throws FieldCountError.
TweetRecord decode_record(std::string_view line);

enum class FileKind { crawl, processed };

struct FileLocator {
  std::chrono::year_month_day date;
  int hour = 0;
  FileKind kind = FileKind::crawl;

  bool operator==(const FileLocator&) const = default;
};

inline constexpr std::string_view kDefaultDataRoot = "./data";

// "<root>/MM-DD-YYYY/tweets-HH AM|PM.txt"
std::string crawl_file_path(const FileLocator& loc, std::string_view root = kDefaultDataRoot);
// "<root>/MM-DD-YYYY-tweets-HH AM|PM.json"
std::string processed_file_path(const FileLocator& loc, std::string_view root = kDefaultDataRoot);

// Recovers the crawl locator from a crawl file path (directory + file name).
std::optional<FileLocator> parse_crawl_file_path(std::string_view path);

}  // namespace twcrawl
