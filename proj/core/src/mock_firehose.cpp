#include "twcrawl/mock_firehose.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>

#include "corpora.hpp"
#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

// Bounds the timestamp memory for re-served tweets; older cursors fall back
// to the request time.
constexpr std::size_t kRecentCreatedCapacity = 1u << 20;

// SplitMix64 keyed by (seed, stream, index). Seeding a Mersenne twister per
// tweet cost more than generating the tweet.
class StreamRng {
 public:
  using result_type = std::uint64_t;
  StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : state_(mix(mix(mix(seed) ^ stream) ^ index)) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

template <typename T>
const T& pick(StreamRng& rng, std::span<const T> items) {
  std::uniform_int_distribution<std::size_t> dist(0, items.size() - 1);
  return items[dist(rng)];
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::uint64_t token_mac(std::uint64_t seed, std::uint64_t cursor, std::int64_t expires_ms) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cursor), static_cast<std::uint32_t>(cursor >> 32),
                    static_cast<std::uint32_t>(expires_ms),
                    static_cast<std::uint32_t>(expires_ms >> 32), 0x6e657874u};
  std::mt19937_64 rng(seq);
  return rng();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

SyntheticUser synthetic_user(std::uint64_t seed, std::uint64_t user_index) {
  StreamRng rng(seed, 1, user_index);
  const std::string_view first = pick(rng, corpora::first_names());
  const std::string_view last = pick(rng, corpora::last_names());
  SyntheticUser u;
  u.name = std::string(first) + " " + std::string(last);
  u.username = lower_ascii(first) + "_" + lower_ascii(last) + std::to_string(user_index);
  u.home_location = std::string(pick(rng, corpora::locations()));
  return u;
}

RawTweet generate_tweet(const FirehoseConfig& cfg, std::uint64_t index, Timestamp created_at) {
  StreamRng rng(cfg.seed, 0, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> user_dist(0, std::max<std::size_t>(cfg.user_pool, 1) - 1);

  const std::uint64_t user_index = user_dist(rng);
  const SyntheticUser user = synthetic_user(cfg.seed, user_index);

  RawTweet t;
  t.creation_date = created_at;
  t.id = std::to_string(kFirstTweetId + index);
  t.name = user.name;
  t.username = user.username;
  t.location = unit(rng) < cfg.empty_location_fraction ? std::string() : user.home_location;
  t.lang = unit(rng) < cfg.und_lang_fraction ? std::string("und")
                                             : std::string(pick(rng, corpora::languages()));
  t.is_retweet = unit(rng) < cfg.retweet_fraction;

  std::uniform_int_distribution<int> len_dist(4, 12);
  const int words = len_dist(rng);
  std::string text;
  for (int i = 0; i < words; ++i) {
    if (!text.empty()) text += ' ';
    text += pick(rng, corpora::words());
  }
  if (unit(rng) < 0.35) text += " " + std::string(pick(rng, corpora::hashtags()));
  if (unit(rng) < 0.15) text += " " + std::string(pick(rng, corpora::hashtags()));
  if (unit(rng) < 0.25) {
    text += " @" + synthetic_user(cfg.seed, user_dist(rng)).username;
  }
  if (unit(rng) < 0.05) text += ", really; truly";
  t.text = std::move(text);
  return t;
}

FirehoseConfig load_firehose_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open firehose config " + path);
  FirehoseConfig cfg;
  bool creds_set = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    try {
      if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "empty_location_fraction") {
        cfg.empty_location_fraction = std::stod(value);
      } else if (key == "und_lang_fraction") {
        cfg.und_lang_fraction = std::stod(value);
      } else if (key == "retweet_fraction") {
        cfg.retweet_fraction = std::stod(value);
      } else if (key == "duplicate_mode") {
        if (value != "true" && value != "false" && value != "on" && value != "off") {
          throw ParseError(lineno, "duplicate_mode must be true/false");
        }
        cfg.duplicate_mode = value == "true" || value == "on";
      } else if (key == "duplicate_window_ms") {
        cfg.duplicate_window = Millis{std::stoll(value)};
      } else if (key == "user_pool") {
        cfg.user_pool = std::stoull(value);
      } else if (key == "credentials") {
        if (!creds_set) cfg.credentials.clear();
        creds_set = true;
        std::size_t start = 0;
        while (start <= value.size()) {
          const auto comma = value.find(',', start);
          const std::string item = trim(std::string_view(value).substr(
              start, comma == std::string::npos ? std::string::npos : comma - start));
          const auto colon = item.find(':');
          if (colon == std::string::npos) throw ParseError(lineno, "credential must be key:secret");
          Credentials c{item.substr(0, colon), item.substr(colon + 1)};
          if (!c.valid()) throw ParseError(lineno, "empty credential key or secret");
          cfg.credentials.push_back(std::move(c));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      } else {
        throw ParseError(lineno, "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "bad value for '" + key + "'");
    }
  }
  return cfg;
}

MockFirehose::MockFirehose(FirehoseConfig cfg) : cfg_(std::move(cfg)) {
  for (const auto& c : cfg_.credentials) {
    if (!c.valid()) throw std::invalid_argument("firehose credentials must be non-empty");
  }
}

std::uint64_t MockFirehose::generated() const {
  std::lock_guard lock(mu_);
  return head_;
}

MockFirehose::ClientState& MockFirehose::authenticate(const Credentials& creds) {
  const bool known = std::find(cfg_.credentials.begin(), cfg_.credentials.end(), creds) !=
                     cfg_.credentials.end();
  if (!creds.valid() || !known) throw AuthError("unknown application credentials");
  return clients_[creds.app_key];
}

std::string MockFirehose::encode_token(std::uint64_t cursor, Timestamp expires) const {
  const std::int64_t exp = to_epoch_ms(expires);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%llx-%llx-%016llx", static_cast<unsigned long long>(cursor),
                static_cast<unsigned long long>(exp),
                static_cast<unsigned long long>(token_mac(cfg_.seed, cursor, exp)));
  return buf;
}

std::optional<std::pair<std::uint64_t, Timestamp>> MockFirehose::decode_token(
    const std::string& token) const {
  const auto d1 = token.find('-');
  const auto d2 = d1 == std::string::npos ? d1 : token.find('-', d1 + 1);
  if (d2 == std::string::npos) return std::nullopt;
  auto hex = [](std::string_view s, std::uint64_t& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  std::uint64_t cursor = 0, exp = 0, mac = 0;
  const std::string_view v(token);
  if (!hex(v.substr(0, d1), cursor) || !hex(v.substr(d1 + 1, d2 - d1 - 1), exp) ||
      !hex(v.substr(d2 + 1), mac)) {
    return std::nullopt;
  }
  if (mac != token_mac(cfg_.seed, cursor, static_cast<std::int64_t>(exp))) return std::nullopt;
  return std::pair{cursor, from_epoch_ms(static_cast<std::int64_t>(exp))};
}

Timestamp MockFirehose::created_at_locked(std::uint64_t index, Timestamp now) {
  if (index >= recent_base_ && index - recent_base_ < recent_created_.size()) {
    return recent_created_[index - recent_base_];
  }
  return now;
}

ApiPage MockFirehose::search(const Credentials& creds, int count,
                             const std::optional<std::string>& next_token, Timestamp now) {
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  const int n = std::min(count, kMaxPageSize);

  std::lock_guard lock(mu_);
  ClientState& client = authenticate(creds);
  RateWindow window = window_for(client, now);
  if (window.used >= window.capacity) throw RateLimitError(window.window_end());
  ++window.used;
  client.used_by_window[window.window_start.time_since_epoch() / window.span] = window.used;

  std::uint64_t start = 0;
  if (next_token) {
    auto decoded = decode_token(*next_token);
    if (!decoded || decoded->first > head_) throw BadTokenError("unknown next token");
    if (now >= decoded->second) throw BadTokenError("expired next token");
    start = decoded->first;
  } else {
    start = head_;
    if (cfg_.duplicate_mode && client.last_plain_at) {
      const Millis elapsed = now - *client.last_plain_at;
      if (elapsed < cfg_.duplicate_window) {
        // Requests closer together than the window overlap the previous
        // page in proportion to how little time has passed.
        const auto shift = static_cast<std::uint64_t>(
            static_cast<std::int64_t>(client.last_plain_size) * std::max<std::int64_t>(elapsed.count(), 0) /
            cfg_.duplicate_window.count());
        start = std::min(head_, client.last_plain_start + shift);
      }
    }
    client.last_plain_at = now;
    client.last_plain_start = start;
    client.last_plain_size = n;
  }

  ApiPage page;
  page.tweets.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = start; i < start + static_cast<std::uint64_t>(n); ++i) {
    Timestamp created = now;
    if (i < head_) {
      created = created_at_locked(i, now);
    } else {
      // Only head_ itself can be generated next: start <= head_ always.
      recent_created_.push_back(now);
      if (recent_created_.size() > kRecentCreatedCapacity) {
        recent_created_.pop_front();
        ++recent_base_;
      }
      ++head_;
    }
    page.tweets.push_back(generate_tweet(cfg_, i, created));
  }
  // The synthetic stream never runs dry, so there is always a next page.
  page.next = encode_token(start + static_cast<std::uint64_t>(n), now + cfg_.token_ttl);
  page.remaining = window.remaining();
  page.reset_at = window.window_end();
  return page;
}

RateStatus MockFirehose::rate_limit_status(const Credentials& creds, Timestamp now) {
  std::lock_guard lock(mu_);
  ClientState& client = authenticate(creds);
  const RateWindow window = window_for(client, now);
  return {window.remaining(), window.window_end()};
}

RateWindow MockFirehose::window_for(ClientState& client, Timestamp now) {
  RateWindow w;
  w.window_start = RateWindow::align(now, w.span);
  const std::int64_t key = w.window_start.time_since_epoch() / w.span;
  // A day of history is plenty for out-of-order concurrent callers.
  constexpr std::int64_t kKeptWindows = 96;
  while (!client.used_by_window.empty() &&
         client.used_by_window.begin()->first < key - kKeptWindows) {
    client.used_by_window.erase(client.used_by_window.begin());
  }
  if (auto it = client.used_by_window.find(key); it != client.used_by_window.end()) {
    w.used = it->second;
  }
  return w;
}

Timestamp RateWindow::align(Timestamp t, Millis span) {
  const auto ms = to_epoch_ms(t);
  const auto s = span.count();
  auto q = ms / s;
  if (ms % s < 0) --q;
  return from_epoch_ms(q * s);
}

void RateWindow::roll(Timestamp now) {
  if (now >= window_end() || now < window_start) {
    window_start = align(now, span);
    used = 0;
  }
}

}  // namespace twcrawl
