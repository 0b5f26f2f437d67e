#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twcrawl/gazetteer.hpp"
#include "twcrawl/record_codec.hpp"

namespace twcrawl {

// A record plus its detected location. city implies country.
struct ProcessedTweet {
  TweetRecord record;
  std::optional<std::string> country;
  std::optional<std::string> city;

  bool operator==(const ProcessedTweet&) const = default;
};

ProcessedTweet process_record(TweetRecord record, const Gazetteer& gazetteer);

struct ProcessResult {
  std::vector<ProcessedTweet> records;
  std::size_t skipped = 0;
  std::string output_path;
};

// Decodes every line of crawl-format text. Lines that fail to decode are
// counted, not fatal. A final empty line (trailing newline) is not a line.
ProcessResult process_lines(std::string_view text, const Gazetteer& gazetteer);

// Reads a crawl file, writes the JSON array to the processed path for the
// same date and hour under out_root. Throws IoError, or Error when in_path
// does not follow the crawl naming scheme.
ProcessResult process_file(const std::string& in_path, const Gazetteer& gazetteer,
                           const std::string& out_root);

// Every crawl file below in_dir, in path order. Files run on up to `workers`
// threads; each file is handled by one worker.
std::vector<ProcessResult> process_directory(const std::string& in_dir, const Gazetteer& gazetteer,
                                             const std::string& out_root, unsigned workers = 0);

// JSON array of objects keyed creation_date, id, lang, location, name,
// username, text, country, city; missing detections are null.
std::string processed_to_json(const std::vector<ProcessedTweet>& records);
std::vector<ProcessedTweet> processed_from_json(std::string_view json);
std::vector<ProcessedTweet> load_processed_file(const std::string& path);

}  // namespace twcrawl
