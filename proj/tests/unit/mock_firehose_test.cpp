#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "test_support.hpp"
#include "twcrawl/errors.hpp"
#include "twcrawl/mock_firehose.hpp"

using namespace twcrawl;
using namespace std::chrono;

namespace {

const Credentials kCreds{"demo-key", "demo-secret"};
const Timestamp kT0 = sys_days{2019y / September / 7d} + 20h;

std::set<std::string> ids_of(const ApiPage& p) {
  std::set<std::string> out;
  for (const auto& t : p.tweets) out.insert(t.id);
  return out;
}

std::size_t overlap(const ApiPage& a, const ApiPage& b) {
  const auto x = ids_of(a), y = ids_of(b);
  std::vector<std::string> both;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
  return both.size();
}

// Binomial mean +- 3 standard deviations.
void expect_binomial(std::size_t hits, std::size_t n, double p, const char* what) {
  const double mean = n * p;
  const double sigma = std::sqrt(n * p * (1 - p));
  EXPECT_GE(static_cast<double>(hits), mean - 3 * sigma) << what;
  EXPECT_LE(static_cast<double>(hits), mean + 3 * sigma) << what;
}

}  // namespace

TEST(GenerateTweet, DeterministicPerSeedAndIndex) {
  FirehoseConfig a, b;
  b.seed = 43;
  std::size_t differing = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    ASSERT_EQ(generate_tweet(a, i, kT0), generate_tweet(a, i, kT0));
    differing += generate_tweet(a, i, kT0) != generate_tweet(b, i, kT0);
  }
  EXPECT_GT(differing, 0u);
}

TEST(GenerateTweet, TwoFreshServersServeIdenticalTweets) {
  MockFirehose a(FirehoseConfig{}), b(FirehoseConfig{});
  const ApiPage pa = a.search(kCreds, 100, std::nullopt, kT0);
  const ApiPage pb = b.search(kCreds, 100, std::nullopt, kT0);
  ASSERT_EQ(pa.tweets.size(), 100u);
  EXPECT_EQ(pa.tweets, pb.tweets);
  EXPECT_EQ(pa.next, pb.next);
}

TEST(GenerateTweet, FractionsWithinThreeSigma) {
  FirehoseConfig cfg;
  cfg.empty_location_fraction = 0.2;
  cfg.und_lang_fraction = 0.1;
  cfg.retweet_fraction = 0.3;
  std::size_t empty = 0, und = 0, rt = 0;
  const std::size_t n = 10000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const RawTweet t = generate_tweet(cfg, i, kT0);
    empty += t.location.empty();
    und += t.lang == "und";
    rt += t.is_retweet;
  }
  expect_binomial(empty, n, 0.2, "empty location");
  expect_binomial(und, n, 0.1, "und language");
  expect_binomial(rt, n, 0.3, "retweets");
}

TEST(GenerateTweet, ZeroAndOneFractions) {
  FirehoseConfig cfg;
  cfg.empty_location_fraction = 0.0;
  cfg.und_lang_fraction = 1.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const RawTweet t = generate_tweet(cfg, i, kT0);
    ASSERT_FALSE(t.location.empty());
    ASSERT_EQ(t.lang, "und");
  }
}

TEST(GenerateTweet, IdsFollowTheIndex) {
  FirehoseConfig cfg;
  EXPECT_EQ(generate_tweet(cfg, 0, kT0).id, std::to_string(kFirstTweetId));
  EXPECT_EQ(generate_tweet(cfg, 12345, kT0).id, std::to_string(kFirstTweetId + 12345));
}

TEST(Search, IdsStrictlyIncreaseAcrossCalls) {
  MockFirehose mock(FirehoseConfig{});
  std::uint64_t last = 0;
  for (int i = 0; i < 20; ++i) {
    const ApiPage p = mock.search(kCreds, 37, std::nullopt, kT0 + seconds{2 * i});
    for (const auto& t : p.tweets) {
      const std::uint64_t id = std::stoull(t.id);
      ASSERT_GT(id, last);
      last = id;
    }
  }
  EXPECT_EQ(mock.generated(), 20u * 37u);
}

TEST(Search, CountIsCappedAt100) {
  MockFirehose mock(FirehoseConfig{});
  EXPECT_EQ(mock.search(kCreds, 100, std::nullopt, kT0).tweets.size(), 100u);
  EXPECT_EQ(mock.search(kCreds, 5000, std::nullopt, kT0).tweets.size(), 100u);
  EXPECT_EQ(mock.search(kCreds, 1, std::nullopt, kT0).tweets.size(), 1u);
  EXPECT_THROW(mock.search(kCreds, 0, std::nullopt, kT0), std::invalid_argument);
}

TEST(Search, UnknownCredentialsAreRejected) {
  MockFirehose mock(FirehoseConfig{});
  EXPECT_THROW(mock.search({"demo-key", "wrong"}, 10, std::nullopt, kT0), AuthError);
  EXPECT_THROW(mock.search({"", ""}, 10, std::nullopt, kT0), AuthError);
  EXPECT_THROW(mock.rate_limit_status({"nobody", "x"}, kT0), AuthError);
}

TEST(RateLimit, FourHundredFiftyFirstRequestFails) {
  MockFirehose mock(FirehoseConfig{});
  for (int i = 0; i < 450; ++i) {
    ASSERT_NO_THROW(mock.search(kCreds, 1, std::nullopt, kT0 + Millis{i}));
  }
  try {
    mock.search(kCreds, 1, std::nullopt, kT0 + Millis{450});
    FAIL() << "451st request succeeded";
  } catch (const RateLimitError& e) {
    EXPECT_EQ(e.reset_at(), kT0 + 15min);
  }
  EXPECT_EQ(mock.rate_limit_status(kCreds, kT0 + 1min).remaining, 0);
}

TEST(RateLimit, StatusDoesNotConsumeQuota) {
  MockFirehose mock(FirehoseConfig{});
  EXPECT_EQ(mock.rate_limit_status(kCreds, kT0).remaining, 450);
  EXPECT_EQ(mock.rate_limit_status(kCreds, kT0).remaining, 450);
  const ApiPage p = mock.search(kCreds, 10, std::nullopt, kT0);
  EXPECT_EQ(p.remaining, 449);
  EXPECT_EQ(p.reset_at, kT0 + 15min);
  const RateStatus s = mock.rate_limit_status(kCreds, kT0 + 1s);
  EXPECT_EQ(s.remaining, 449);
  EXPECT_EQ(s.reset_at, kT0 + 15min);
  EXPECT_EQ(mock.rate_limit_status(kCreds, kT0 + 15min).remaining, 450);
}

TEST(RateLimit, WindowsAreFixedNotSliding) {
  MockFirehose mock(FirehoseConfig{});
  // All 450 in the last second of a window, then 450 more right after the
  // boundary: a sliding window would refuse the second batch.
  const Timestamp late = kT0 + 15min - 1s;
  for (int i = 0; i < 450; ++i) mock.search(kCreds, 1, std::nullopt, late);
  EXPECT_THROW(mock.search(kCreds, 1, std::nullopt, late), RateLimitError);
  for (int i = 0; i < 450; ++i) {
    ASSERT_NO_THROW(mock.search(kCreds, 1, std::nullopt, kT0 + 15min));
  }
  EXPECT_THROW(mock.search(kCreds, 1, std::nullopt, kT0 + 15min), RateLimitError);
}

TEST(RateLimit, WindowsAlignToEpochMultiples) {
  MockFirehose mock(FirehoseConfig{});
  const Timestamp mid = kT0 + 7min + 13s;
  const ApiPage p = mock.search(kCreds, 1, std::nullopt, mid);
  EXPECT_EQ(p.reset_at, kT0 + 15min);
}

TEST(RateLimit, CredentialsHaveSeparateWindows) {
  FirehoseConfig cfg;
  cfg.credentials = {{"a", "1"}, {"b", "2"}};
  MockFirehose mock(cfg);
  for (int i = 0; i < 450; ++i) mock.search({"a", "1"}, 1, std::nullopt, kT0);
  EXPECT_THROW(mock.search({"a", "1"}, 1, std::nullopt, kT0), RateLimitError);
  EXPECT_NO_THROW(mock.search({"b", "2"}, 1, std::nullopt, kT0));
}

TEST(RateLimit, RandomScheduleMatchesFixedWindowOracle) {
  // Oracle: walk the schedule in time order and admit a request iff fewer
  // than 450 were admitted in its window, window = floor(t / 15 min).
  std::mt19937_64 rng(99);
  for (int round = 0; round < 5; ++round) {
    MockFirehose mock(FirehoseConfig{});
    std::uniform_int_distribution<std::int64_t> offset(0, 4 * 15 * 60 * 1000 - 1);
    std::vector<Timestamp> schedule(3000);
    for (auto& t : schedule) t = kT0 + Millis{offset(rng)};
    std::sort(schedule.begin(), schedule.end());

    std::map<std::int64_t, int> oracle;
    std::map<std::int64_t, int> observed;
    for (const Timestamp t : schedule) {
      const std::int64_t w = to_epoch_ms(t) / (15 * 60 * 1000);
      const bool expect_ok = oracle[w] < 450;
      if (expect_ok) ++oracle[w];
      bool ok = true;
      try {
        mock.search(kCreds, 1, std::nullopt, t);
      } catch (const RateLimitError&) {
        ok = false;
      }
      ASSERT_EQ(ok, expect_ok);
      observed[w] += ok;
    }
    for (const auto& [w, n] : observed) EXPECT_LE(n, 450);
    EXPECT_EQ(observed, oracle);
  }
}

TEST(RateLimit, ConcurrentCallersNeverExceedCapacity) {
  MockFirehose mock(FirehoseConfig{});
  std::atomic<int> ok{0}, limited{0};
  std::vector<std::thread> threads;
  std::mutex ids_mu;
  std::set<std::string> ids;
  std::size_t served = 0;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 100; ++i) {
        try {
          const ApiPage p = mock.search(kCreds, 10, std::nullopt, kT0 + Millis{i});
          ++ok;
          std::lock_guard lock(ids_mu);
          served += p.tweets.size();
          for (const auto& tw : p.tweets) ids.insert(tw.id);
        } catch (const RateLimitError&) {
          ++limited;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 450);
  EXPECT_EQ(limited.load(), 350);
  EXPECT_EQ(ids.size(), served);
}

TEST(Pagination, NextContinuesWithoutOverlap) {
  MockFirehose mock(FirehoseConfig{});
  ApiPage p = mock.search(kCreds, 100, std::nullopt, kT0);
  std::set<std::string> all = ids_of(p);
  std::size_t total = p.tweets.size();
  for (int i = 1; i < 50; ++i) {
    ASSERT_TRUE(p.next);
    const std::uint64_t last = std::stoull(p.tweets.back().id);
    p = mock.search(kCreds, 100, p.next, kT0 + seconds{2 * i});
    EXPECT_EQ(std::stoull(p.tweets.front().id), last + 1);
    total += p.tweets.size();
    for (const auto& t : p.tweets) all.insert(t.id);
  }
  EXPECT_EQ(all.size(), total);
}

TEST(Pagination, BadTokens) {
  MockFirehose mock(FirehoseConfig{});
  const ApiPage p = mock.search(kCreds, 10, std::nullopt, kT0);
  ASSERT_TRUE(p.next);
  EXPECT_THROW(mock.search(kCreds, 10, std::string("garbage"), kT0), BadTokenError);
  std::string tampered = *p.next;
  tampered.back() = tampered.back() == '0' ? '1' : '0';
  EXPECT_THROW(mock.search(kCreds, 10, tampered, kT0), BadTokenError);
  // Valid until the TTL runs out.
  EXPECT_NO_THROW(mock.search(kCreds, 10, p.next, kT0 + 15min - 1ms));
  EXPECT_THROW(mock.search(kCreds, 10, p.next, kT0 + 15min), BadTokenError);
}

TEST(Pagination, TokenFromAnotherSeedIsRejected) {
  FirehoseConfig other;
  other.seed = 7;
  MockFirehose a(FirehoseConfig{}), b(other);
  const ApiPage p = a.search(kCreds, 10, std::nullopt, kT0);
  EXPECT_THROW(b.search(kCreds, 10, p.next, kT0), BadTokenError);
}

TEST(DuplicateMode, CloseCursorlessRequestsOverlap) {
  FirehoseConfig cfg;
  cfg.duplicate_mode = true;
  MockFirehose mock(cfg);
  const ApiPage a = mock.search(kCreds, 100, std::nullopt, kT0);
  const ApiPage b = mock.search(kCreds, 100, std::nullopt, kT0 + 500ms);
  EXPECT_GT(overlap(a, b), 0u);
  // The re-served tweets are the same tweets, creation time included.
  for (const auto& t : b.tweets) {
    auto it = std::find_if(a.tweets.begin(), a.tweets.end(), [&](const RawTweet& x) { return x.id == t.id; });
    if (it != a.tweets.end()) ASSERT_EQ(*it, t);
  }
}

TEST(DuplicateMode, ChainedRequestsDoNotOverlap) {
  FirehoseConfig cfg;
  cfg.duplicate_mode = true;
  MockFirehose mock(cfg);
  const ApiPage a = mock.search(kCreds, 100, std::nullopt, kT0);
  const ApiPage b = mock.search(kCreds, 100, a.next, kT0 + 500ms);
  EXPECT_EQ(overlap(a, b), 0u);
}

TEST(DuplicateMode, SpacedRequestsDoNotOverlap) {
  FirehoseConfig cfg;
  cfg.duplicate_mode = true;
  MockFirehose mock(cfg);
  const ApiPage a = mock.search(kCreds, 100, std::nullopt, kT0);
  const ApiPage b = mock.search(kCreds, 100, std::nullopt, kT0 + 2000ms);
  EXPECT_EQ(overlap(a, b), 0u);
}

TEST(DuplicateMode, OffMeansNoOverlap) {
  MockFirehose mock(FirehoseConfig{});
  const ApiPage a = mock.search(kCreds, 100, std::nullopt, kT0);
  const ApiPage b = mock.search(kCreds, 100, std::nullopt, kT0 + 500ms);
  EXPECT_EQ(overlap(a, b), 0u);
}

TEST(FirehoseConfigFile, ParsesKeys) {
  twtest::TempDir dir;
  twtest::spit(dir.file("mock.conf"),
               "# mock\nseed = 7\nempty_location_fraction = 0.5\nund_lang_fraction=0.25\n"
               "retweet_fraction = 0\nduplicate_mode = on\nduplicate_window_ms = 750\n"
               "user_pool = 10\ncredentials = k1:s1, k2:s2\n");
  const FirehoseConfig cfg = load_firehose_config(dir.file("mock.conf"));
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_DOUBLE_EQ(cfg.empty_location_fraction, 0.5);
  EXPECT_DOUBLE_EQ(cfg.und_lang_fraction, 0.25);
  EXPECT_DOUBLE_EQ(cfg.retweet_fraction, 0.0);
  EXPECT_TRUE(cfg.duplicate_mode);
  EXPECT_EQ(cfg.duplicate_window, Millis{750});
  EXPECT_EQ(cfg.user_pool, 10u);
  EXPECT_EQ(cfg.credentials, (std::vector<Credentials>{{"k1", "s1"}, {"k2", "s2"}}));
}

TEST(FirehoseConfigFile, RejectsUnknownKeysAndBadValues) {
  twtest::TempDir dir;
  twtest::spit(dir.file("a.conf"), "seed = 1\ncolour = blue\n");
  try {
    load_firehose_config(dir.file("a.conf"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  twtest::spit(dir.file("b.conf"), "seed = many\n");
  EXPECT_THROW(load_firehose_config(dir.file("b.conf")), ParseError);
  EXPECT_THROW(load_firehose_config(dir.file("missing.conf")), IoError);
}

TEST(SyntheticUsers, UsernamesAreLowercaseAndIndexed) {
  const SyntheticUser u = synthetic_user(42, 17);
  EXPECT_FALSE(u.name.empty());
  EXPECT_TRUE(u.username.ends_with("17"));
  EXPECT_EQ(u.username, [&] {
    std::string s = u.username;
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }());
  EXPECT_EQ(synthetic_user(42, 17).username, u.username);
}
