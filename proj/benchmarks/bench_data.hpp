#pragma once

#include <twcrawl/crawler.hpp>
#include <twcrawl/mock_firehose.hpp>

#include <vector>

// Records drawn from the mock stream, so field shapes match a real crawl.
inline std::vector<twcrawl::TweetRecord> stream_records(std::size_t n, std::uint64_t seed = 42) {
  twcrawl::FirehoseConfig cfg;
  cfg.seed = seed;
  const auto t0 = twcrawl::from_epoch_ms(1'567'886'400'000);
  std::vector<twcrawl::TweetRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(twcrawl::to_record(twcrawl::generate_tweet(cfg, i, t0)));
  return out;
}
