// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "test_support.hpp"
#include "twcrawl/analyzer.hpp"
#include "twcrawl/compliance_ledger.hpp"
#include "twcrawl/crawler.hpp"
#include "twcrawl/errors.hpp"
#include "twcrawl/mock_firehose.hpp"
#include "twcrawl/privacy_gateway.hpp"
#include "twcrawl/processor.hpp"
#include "twcrawl/pruner.hpp"
#include "twcrawl/pseudonym_vault.hpp"
#include "twcrawl/record_codec.hpp"

using namespace twcrawl;
using namespace std::chrono;
namespace fs = std::filesystem;

namespace {

const Credentials kCreds{"demo-key", "demo-secret"};
const Timestamp kT0 = sys_days{2019y / September / 7d} + 20h;

using Wall = steady_clock;

double seconds_since(Wall::time_point t0) { return duration<double>(Wall::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int n, const Outcome& o) {
  std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

// Every crawl run below goes through here so criterion 6 sees all of them.
std::vector<CrawlStats> all_runs;

CrawlStats crawl(FirehoseConfig mock_cfg, Millis interval, bool use_next, std::uint64_t max_requests,
                 Millis duration, const std::string& out_dir, Timestamp start = kT0) {
  MockFirehose mock(std::move(mock_cfg));
  VirtualClock clock(start);
  CrawlConfig cfg;
  cfg.creds = kCreds;
  cfg.interval = interval;
  cfg.use_next = use_next;
  cfg.duration = duration;
  if (max_requests) cfg.max_requests = max_requests;
  cfg.out_dir = out_dir;
  CrawlStats s = run_crawl(cfg, mock, clock);
  all_runs.push_back(s);
  return s;
}

std::vector<std::string> crawl_files_under(const std::string& root) {
  std::vector<std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && parse_crawl_file_path(e.path().string())) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// 1 -------------------------------------------------------------------------
Outcome duplicates(const std::string& root) {
  const auto t0 = Wall::now();
  FirehoseConfig dup;
  dup.duplicate_mode = true;
  const CrawlStats fast = crawl(dup, 500ms, false, 200, 24h, root + "/dup-fast");
  const CrawlStats paced = crawl(dup, 2000ms, true, 200, 24h, root + "/dup-paced");
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "500ms/no-next: requests=" << fast.requests << " duplicates_dropped=" << fast.duplicates_dropped
    << " (need >0); 2000ms/next: requests=" << paced.requests << " tweets_seen=" << paced.tweets_seen
    << " (need >=20000) duplicates_dropped=" << paced.duplicates_dropped << " (need 0); runtime="
    << secs << "s (need <30)";
  return {fast.requests == 200 && fast.duplicates_dropped > 0 && paced.requests == 200 &&
              paced.duplicates_dropped == 0 && paced.tweets_seen >= 20000 && secs < 30,
          d.str()};
}

// 2 -------------------------------------------------------------------------
Outcome rate_limit() {
  const auto t0 = Wall::now();
  MockFirehose mock(FirehoseConfig{});
  auto burst = [&](Timestamp window_start, int n, int& ok, int& limited) {
    for (int i = 0; i < n; ++i) {
      // spread over the first 14 minutes of the window
      const Timestamp at = window_start + Millis{static_cast<std::int64_t>(i) * 840'000 / n};
      try {
        mock.search(kCreds, 1, std::nullopt, at);
        ++ok;
      } catch (const RateLimitError&) {
        ++limited;
      }
    }
  };
  int ok1 = 0, limited1 = 0;
  burst(kT0, 1000, ok1, limited1);
  int ok4 = 0, limited4 = 0;
  for (int w = 1; w <= 4; ++w) burst(kT0 + w * kRateWindowSpan, 1000, ok4, limited4);
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "one window: ok=" << ok1 << " limited=" << limited1 << " (need 450/550); four windows: ok=" << ok4
    << " (need 1800); runtime=" << secs << "s (need <5)";
  return {ok1 == 450 && limited1 == 550 && ok4 == 1800 && secs < 5, d.str()};
}

// 3 -------------------------------------------------------------------------
Outcome throughput(const std::string& root) {
  const auto t0 = Wall::now();
  const std::uint64_t per_hour =
      static_cast<std::uint64_t>(kRequestsPerWindow) * (1h / kRateWindowSpan) * kMaxPageSize;
  const std::uint64_t eight_days = per_hour * 24 * 8;
  const CrawlStats hour = crawl(FirehoseConfig{}, 2000ms, true, 0, 1h, root + "/hour");
  const double secs = seconds_since(t0);
  const double share = static_cast<double>(hour.tweets_seen) / static_cast<double>(per_hour);
  std::ostringstream d;
  d << "ceiling/hour=" << per_hour << " (need 180000); 8-day ceiling=" << eight_days
    << " (need >=30000000); 1h run tweets_seen=" << hour.tweets_seen << " = " << share * 100
    << "% (need >=95%); runtime=" << secs << "s (need <60)";
  return {per_hour == 180000 && eight_days == 34'560'000 && eight_days >= 30'000'000 && share >= 0.95 &&
              secs < 60,
          d.str()};
}

// 4 -------------------------------------------------------------------------
Outcome codec(const std::string& root) {
  std::mt19937_64 rng(20190907);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const TweetRecord r = twtest::random_record(rng);
    if (decode_record(encode_record(r)) != r) ++mismatches;
  }
  std::size_t lines = 0, field_errors = 0;
  for (const auto& f : crawl_files_under(root)) {
    for (const auto& line : lines_of(f)) {
      ++lines;
      try {
        decode_record(line);
      } catch (const FieldCountError&) {
        ++field_errors;
      }
    }
  }
  std::ostringstream d;
  d << "10000 random records, mismatches=" << mismatches << " (need 0); persisted lines=" << lines
    << " FieldCountError=" << field_errors << " (need 0)";
  return {mismatches == 0 && lines > 0 && field_errors == 0, d.str()};
}

// 5 -------------------------------------------------------------------------
Outcome file_names(const std::string& root) {
  const fs::path old_cwd = fs::current_path();
  const fs::path sandbox = fs::path(root) / "naming";
  fs::create_directories(sandbox);
  fs::current_path(sandbox);
  std::string crawl_path, processed_path;
  try {
    // default output root is ./data
    const CrawlStats s = crawl(FirehoseConfig{}, 2000ms, true, 5, 1h, std::string(kDefaultDataRoot),
                               kT0 + 37min);
    crawl_path = s.files_written.empty() ? "" : s.files_written.front();
    const std::string morning = crawl_file_path({2019y / September / 8d, 6, FileKind::crawl});
    const CrawlStats m = crawl(FirehoseConfig{}, 2000ms, true, 5, 1h, std::string(kDefaultDataRoot),
                               sys_days{2019y / September / 8d} + 6h + 12min);
    if (m.files_written.empty() || m.files_written.front() != morning) throw Error("06 AM crawl file missing");
    processed_path = process_file(morning, Gazetteer::bundled(), std::string(kDefaultDataRoot)).output_path;
  } catch (...) {
    fs::current_path(old_cwd);
    throw;
  }
  fs::current_path(old_cwd);
  const bool ok = crawl_path == "./data/09-07-2019/tweets-20 PM.txt" &&
                  processed_path == "./data/09-08-2019-tweets-06 AM.json" &&
                  fs::exists(sandbox / crawl_path) && fs::exists(sandbox / processed_path);
  return {ok, "crawl=\"" + crawl_path + "\" processed=\"" + processed_path + "\""};
}

// 6 -------------------------------------------------------------------------
Outcome filter_totality(const std::string& root) {
  std::size_t lines = 0, empty_location = 0, und = 0;
  for (const auto& f : crawl_files_under(root)) {
    for (const auto& line : lines_of(f)) {
      ++lines;
      const TweetRecord r = decode_record(line);
      if (r.location.empty()) ++empty_location;
      if (r.lang == "und") ++und;
    }
  }
  std::size_t unbalanced = 0;
  for (const auto& s : all_runs) unbalanced += !s.balanced();
  std::ostringstream d;
  d << "lines=" << lines << " empty_location=" << empty_location << " und=" << und
    << " (need 0/0); runs=" << all_runs.size() << " unbalanced=" << unbalanced << " (need 0)";
  return {lines > 0 && empty_location == 0 && und == 0 && unbalanced == 0 && !all_runs.empty(), d.str()};
}

// 7 -------------------------------------------------------------------------
Outcome pii(const std::string& root) {
  VirtualClock clock(kT0);
  PseudonymVault vault(clock, root + "/pii/vault.jsonl");
  ComplianceLedger ledger(root + "/pii/ledger.jsonl", clock, false);
  PrivacyGateway gw(vault, ledger, CategoryRules::bundled());
  ServiceRegistry registry;
  std::vector<std::shared_ptr<MemorySink>> sinks;
  for (auto c : {Category::ecommerce, Category::demographic_social, Category::food, Category::travel}) {
    sinks.push_back(std::make_shared<MemorySink>("svc-" + std::string(to_string(c))));
    registry.add(c, sinks.back());
  }
  registry.add(Category::food, std::make_shared<DirectorySink>("svc-food", root + "/pii/food"));

  // Mock tweets, through the processor, until 1,000 distinct authors.
  FirehoseConfig cfg;
  std::map<std::string, std::vector<std::string>> identifiers;
  std::uint64_t index = 0;
  std::size_t dispatched = 0;
  while (identifiers.size() < 1000) {
    const RawTweet raw = generate_tweet(cfg, index++, kT0);
    if (!filter_tweet(raw)) continue;
    const ProcessedTweet p = process_record(to_record(raw), Gazetteer::bundled());
    auto& ids = identifiers[p.record.username];
    for (const std::string& s : {p.record.username, p.record.name, p.record.id}) {
      if (s.size() >= 4 && std::find(ids.begin(), ids.end(), s) == ids.end()) ids.push_back(s);
    }
    for (const auto& b : gw.pseudonymize(p)) {
      gw.dispatch(b, registry);
      ++dispatched;
    }
  }
  std::vector<std::string> corpus;
  for (const auto& s : sinks) {
    for (auto& j : s->delivered()) corpus.push_back(std::move(j));
  }
  corpus.push_back(twtest::slurp(root + "/pii/food/bundles.jsonl"));
  corpus.push_back(twtest::slurp(ledger.path()));

  std::size_t hits = 0, checked = 0;
  std::string first_hit;
  for (const auto& [user, ids] : identifiers) {
    for (const auto& id : ids) {
      ++checked;
      for (const auto& text : corpus) {
        if (text.find(id) != std::string::npos) {
          if (first_hit.empty()) first_hit = id;
          ++hits;
        }
      }
    }
  }
  std::ostringstream d;
  d << "users=" << identifiers.size() << " identifiers=" << checked << " dispatched=" << dispatched
    << " ledger_entries=" << ledger.last_seq() << " hits=" << hits << " (need 0)";
  if (!first_hit.empty()) d << " first=\"" << first_hit << "\"";
  return {identifiers.size() == 1000 && ledger.last_seq() == dispatched && hits == 0, d.str()};
}

// 8 -------------------------------------------------------------------------
Outcome remap() {
  VirtualClock clock(kT0);
  PseudonymVault vault(clock);
  twtest::TempDir dir;
  ComplianceLedger ledger(dir.file("ledger.jsonl"), clock, false);
  PrivacyGateway gw(vault, ledger, CategoryRules::bundled());
  std::vector<std::pair<std::string, std::string>> issued;
  for (int i = 0; i < 10000; ++i) {
    const std::string user = synthetic_user(42, static_cast<std::uint64_t>(i)).username;
    ProcessedTweet p;
    p.record = {"Sat Sep 07 20:00:00 +0000 2019", std::to_string(kFirstTweetId + i), "en", "", "N", user, "OT hi"};
    issued.emplace_back(user, gw.pseudonymize(p).front().code);
  }
  std::size_t wrong = 0;
  for (const auto& [user, code] : issued) {
    if (gw.remap({code, Category::travel, "item"}).first != user) ++wrong;
  }
  std::size_t still_live = 0, erased = 0;
  for (std::size_t i = 0; i < issued.size(); i += 2) {
    gw.erase_user(issued[i].first);
    ++erased;
  }
  std::size_t survivors_broken = 0;
  for (std::size_t i = 0; i < issued.size(); ++i) {
    bool unknown = false;
    try {
      if (gw.remap({issued[i].second, Category::travel, "item"}).first != issued[i].first) ++survivors_broken;
    } catch (const UnknownCodeError&) {
      unknown = true;
    }
    if (i % 2 == 0 && !unknown) ++still_live;
    if (i % 2 == 1 && unknown) ++survivors_broken;
  }
  std::ostringstream d;
  d << "users=" << issued.size() << " remap mismatches=" << wrong << " (need 0); erased=" << erased
    << " still resolvable=" << still_live << " (need 0); untouched users broken=" << survivors_broken;
  return {issued.size() == 10000 && wrong == 0 && still_live == 0 && survivors_broken == 0, d.str()};
}

// 9 -------------------------------------------------------------------------
bool word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::map<std::string, std::uint64_t> scan_tokens(const std::vector<ProcessedTweet>& rs, char sigil) {
  std::map<std::string, std::uint64_t> m;
  for (const auto& p : rs) {
    const std::string& t = p.record.text;
    for (std::size_t i = 0; i < t.size();) {
      if (t[i] == sigil && i + 1 < t.size() && word_char(t[i + 1])) {
        std::size_t j = i + 1;
        while (j < t.size() && word_char(t[j])) ++j;
        ++m[t.substr(i, j - i)];
        i = j;
      } else {
        ++i;
      }
    }
  }
  return m;
}

std::vector<AnalysisRow> ranked(const std::map<std::string, std::uint64_t>& m, std::size_t limit) {
  std::vector<AnalysisRow> rows;
  for (const auto& [k, c] : m) rows.push_back({k, c});
  // map order is key ascending; a stable sort on count alone gives the tie rule
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  if (rows.size() > limit) rows.resize(limit);
  return rows;
}

Outcome analyzer_oracle(const std::string& root) {
  std::vector<ProcessedTweet> records;
  for (const auto& f : crawl_files_under(root + "/hour")) {
    for (auto& p : process_lines(twtest::slurp(f), Gazetteer::bundled()).records) {
      if (records.size() < 1000) records.push_back(std::move(p));
    }
  }
  std::map<std::string, std::map<std::string, std::uint64_t>> expect;
  for (const auto& p : records) {
    ++expect["lang"][p.record.lang];
    if (p.country) ++expect["country"][*p.country];
  }
  expect["country"];
  expect["hashtag"] = scan_tokens(records, '#');
  expect["mention"] = scan_tokens(records, '@');

  const AnalysisResult got = analyze(records, builtin_specs());
  std::size_t analysis_mismatch = 0, prune_mismatch = 0;
  for (const auto& [name, counts] : expect) {
    if (got.at(name) != ranked(counts, counts.size())) ++analysis_mismatch;
    for (std::size_t limit : {1u, 5u, 20u, 100u}) {
      if (prune(got.at(name), {limit, PruneOrder::count_desc}) != ranked(counts, limit)) ++prune_mismatch;
    }
  }
  std::ostringstream d;
  d << "records=" << records.size() << " analyses checked=" << expect.size()
    << " mismatches=" << analysis_mismatch << " prune mismatches=" << prune_mismatch << " (need 0/0)";
  return {records.size() == 1000 && analysis_mismatch == 0 && prune_mismatch == 0, d.str()};
}

}  // namespace

int main() {
  const auto start = Wall::now();
  twtest::TempDir work;
  const std::string root = work.str();

  // 5 runs before 4 and 6 so its crawl files are scanned too
  std::map<int, Outcome> results;
  results[1] = guarded([&] { return duplicates(root); });
  results[2] = guarded([] { return rate_limit(); });
  results[3] = guarded([&] { return throughput(root); });
  results[5] = guarded([&] { return file_names(root); });
  results[4] = guarded([&] { return codec(root); });
  results[6] = guarded([&] { return filter_totality(root); });
  results[7] = guarded([&] { return pii(root); });
  results[8] = guarded([] { return remap(); });
  results[9] = guarded([&] { return analyzer_oracle(root); });
  for (const auto& [n, o] : results) report(n, o);

  const double total = seconds_since(start);
  std::ostringstream d;
  d << "total runtime=" << total << "s (need <300)";
  report(10, {total < 300, d.str()});
  return failures == 0 ? 0 : 1;
}
