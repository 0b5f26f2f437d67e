#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "twcrawl/clock.hpp"
#include "twcrawl/record_codec.hpp"
#include "twcrawl/search_api.hpp"

namespace twcrawl {

struct CrawlConfig {
  Credentials creds;
  Millis interval{2000};
  bool use_next = true;
  int page_count = kMaxPageSize;
  Millis duration = std::chrono::hours{1};
  // Stop after this many successful search calls, if set.
  std::optional<std::uint64_t> max_requests;
  std::size_t dedup_capacity = 10'000'000;
  std::string out_dir{kDefaultDataRoot};
  int max_retries = 3;
  Millis initial_backoff{1000};
};

// Throws std::invalid_argument naming the offending field.
void validate(const CrawlConfig& cfg);

struct CrawlStats {
  std::uint64_t requests = 0;
  std::uint64_t tweets_seen = 0;
  std::uint64_t tweets_kept = 0;
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t filtered_no_location = 0;
  std::uint64_t filtered_no_lang = 0;
  std::uint64_t rate_limit_waits = 0;
  // Tweets whose id could not be stored (non-digit ids); never produced by
  // the mock.
  std::uint64_t malformed_dropped = 0;
  std::uint64_t network_retries = 0;
  std::uint64_t pages_skipped = 0;
  std::uint64_t bad_tokens = 0;
  std::vector<std::string> files_written;

  bool balanced() const {
    return tweets_kept + duplicates_dropped + filtered_no_location + filtered_no_lang +
               malformed_dropped ==
           tweets_seen;
  }
};

// Keeps tweets whose author set a location and whose language was detected.
bool filter_tweet(const RawTweet& t);

// "OT " or "RT " in front of the text.
std::string prefix_text(const RawTweet& t);

// How long to wait before the next request may go out under window.
Millis throttle(const RateWindow& window, Timestamp now);

// Prefixed, sanitized record ready for encode_record.
TweetRecord to_record(const RawTweet& t);

// Seen-id set with a fixed capacity; the oldest id is evicted first.
class SeenIds {
 public:
  explicit SeenIds(std::size_t capacity) : capacity_(capacity) {}

  // False when id was already present.
  bool insert(const std::string& id);
  std::size_t size() const { return order_.size(); }

 private:
  std::size_t capacity_;
  std::unordered_set<std::uint64_t> numeric_;
  std::unordered_set<std::string> other_;
  std::deque<std::string> order_;
};

// Appends encoded lines to the crawl file for the fetch hour. Rolls to a new
// file only between pages.
class CrawlWriter {
 public:
  explicit CrawlWriter(std::string root) : root_(std::move(root)) {}

  void write_page(Timestamp fetched_at, const std::vector<std::string>& lines);
  void flush();
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string root_;
  std::string current_path_;
  std::ofstream out_;
  std::vector<std::string> files_;
};

// The crawl loop: page through the endpoint at cfg.interval, staying inside
// the fixed rate window, and persist filtered, deduplicated records.
// AuthError propagates; rate limiting waits; network errors are retried.
CrawlStats run_crawl(const CrawlConfig& cfg, SearchEndpoint& endpoint, Clock& clock);

}  // namespace twcrawl
