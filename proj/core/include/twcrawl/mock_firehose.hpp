#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "twcrawl/search_api.hpp"

namespace twcrawl {

struct FirehoseConfig {
  std::uint64_t seed = 42;
  double empty_location_fraction = 0.2;
  double und_lang_fraction = 0.1;
  double retweet_fraction = 0.3;
  // Cursor-less requests repeated within duplicate_window re-serve part of
  // the previous page.
  bool duplicate_mode = false;
  Millis duplicate_window{1000};
  Millis token_ttl = std::chrono::minutes{15};
  std::size_t user_pool = 5000;
  std::vector<Credentials> credentials = {{"demo-key", "demo-secret"}};
};

// Loads "key = value" lines (seed, empty_location_fraction, und_lang_fraction,
// retweet_fraction, duplicate_mode, duplicate_window_ms, user_pool,
// credentials = key:secret[,key:secret...]). Unknown keys are a ParseError.
FirehoseConfig load_firehose_config(const std::string& path);

// Synthetic user, fully determined by (seed, user index).
struct SyntheticUser {
  std::string name;
  std::string username;
  std::string home_location;
};

SyntheticUser synthetic_user(std::uint64_t seed, std::uint64_t user_index);

// Tweet number `index` of the stream for this seed. Pure.
RawTweet generate_tweet(const FirehoseConfig& cfg, std::uint64_t index, Timestamp created_at);

// Tweet ids are this base plus the stream index.
inline constexpr std::uint64_t kFirstTweetId = 1'170'000'000'000'000'000ULL;

// Deterministic Search API stand-in. Thread-safe; all state changes happen
// under one lock so generation order is serialized.
class MockFirehose final : public SearchEndpoint {
 public:
  explicit MockFirehose(FirehoseConfig cfg);

  // query is accepted and ignored: every synthetic tweet matches.
  ApiPage search(const Credentials& creds, int count, const std::optional<std::string>& next_token,
                 Timestamp now) override;
  RateStatus rate_limit_status(const Credentials& creds, Timestamp now) override;

  const FirehoseConfig& config() const { return cfg_; }
  std::uint64_t generated() const;

 private:
  struct ClientState {
    // Requests charged per fixed window, keyed by window index since epoch.
    std::map<std::int64_t, int> used_by_window;
    std::optional<Timestamp> last_plain_at;
    std::uint64_t last_plain_start = 0;
    int last_plain_size = 0;
  };

  ClientState& authenticate(const Credentials& creds);
  static RateWindow window_for(ClientState& client, Timestamp now);
  std::string encode_token(std::uint64_t cursor, Timestamp expires) const;
  std::optional<std::pair<std::uint64_t, Timestamp>> decode_token(const std::string& token) const;
  Timestamp created_at_locked(std::uint64_t index, Timestamp now);

  FirehoseConfig cfg_;
  mutable std::mutex mu_;
  std::map<std::string, ClientState> clients_;
  std::uint64_t head_ = 0;
  // Creation times of the most recent indices, so re-served tweets keep
  // their original timestamp.
  std::deque<Timestamp> recent_created_;
  std::uint64_t recent_base_ = 0;
};

}  // namespace twcrawl
