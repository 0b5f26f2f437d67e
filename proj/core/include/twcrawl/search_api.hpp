#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twcrawl/time.hpp"

namespace twcrawl {

inline constexpr int kRequestsPerWindow = 450;
inline constexpr Millis kRateWindowSpan = std::chrono::minutes{15};
inline constexpr int kMaxPageSize = 100;

// A tweet as served by the Search API, before crawler filtering.
struct RawTweet {
  Timestamp creation_date;
  std::string id;
  std::string lang;
  std::string location;
  std::string name;
  std::string username;
  std::string text;
  bool is_retweet = false;

  bool operator==(const RawTweet&) const = default;
};

struct Credentials {
  std::string app_key;
  std::string app_secret;

  bool valid() const { return !app_key.empty() && !app_secret.empty(); }
  bool operator==(const Credentials&) const = default;
};

// Fixed (not sliding) request window. Boundaries sit at whole multiples of
// span since the Unix epoch.
struct RateWindow {
  Timestamp window_start{};
  int used = 0;
  int capacity = kRequestsPerWindow;
  Millis span = kRateWindowSpan;

  Timestamp window_end() const { return window_start + span; }
  int remaining() const { return capacity - used; }

  static Timestamp align(Timestamp t, Millis span = kRateWindowSpan);
  // Starts a fresh window when now has passed the current one.
  void roll(Timestamp now);
};

struct RateStatus {
  int remaining = 0;
  Timestamp reset_at{};
};

struct ApiPage {
  std::vector<RawTweet> tweets;
  std::optional<std::string> next;
  int remaining = 0;
  Timestamp reset_at{};
};

// Anything that answers Search API calls: the in-process mock, or an HTTP
// client talking to a server. now is the caller's clock reading; servers
// that run on virtual time use it, real ones may ignore it.
class SearchEndpoint {
 public:
  virtual ~SearchEndpoint() = default;

  // Throws AuthError, RateLimitError, BadTokenError, NetworkError.
  virtual ApiPage search(const Credentials& creds, int count,
                         const std::optional<std::string>& next_token, Timestamp now) = 0;
  virtual RateStatus rate_limit_status(const Credentials& creds, Timestamp now) = 0;
};

}  // namespace twcrawl
