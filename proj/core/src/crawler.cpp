#include "twcrawl/crawler.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

std::optional<std::uint64_t> numeric_id(const std::string& id) {
  if (id.empty() || id.size() > 19) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
  if (ec != std::errc{} || p != id.data() + id.size()) return std::nullopt;
  // Leading zeros would alias distinct strings.
  if (id.size() > 1 && id.front() == '0') return std::nullopt;
  return v;
}

FileLocator locator_for(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(t);
  const auto hour = duration_cast<hours>(t - day).count();
  return {year_month_day{day}, static_cast<int>(hour), FileKind::crawl};
}

}  // namespace

void validate(const CrawlConfig& cfg) {
  if (!cfg.creds.valid()) throw std::invalid_argument("credentials must be non-empty");
  if (cfg.interval.count() <= 0) throw std::invalid_argument("interval must be positive");
  if (cfg.page_count < 1 || cfg.page_count > kMaxPageSize) {
    throw std::invalid_argument("page count must be in [1, 100]");
  }
  if (cfg.duration.count() < 0) throw std::invalid_argument("duration must be non-negative");
  if (cfg.dedup_capacity == 0) throw std::invalid_argument("dedup capacity must be positive");
  if (cfg.max_retries < 0) throw std::invalid_argument("max retries must be non-negative");
}

bool filter_tweet(const RawTweet& t) {
  return !is_blank(t.location) && !t.lang.empty() && t.lang != "und";
}

std::string prefix_text(const RawTweet& t) { return (t.is_retweet ? "RT " : "OT ") + t.text; }

Millis throttle(const RateWindow& window, Timestamp now) {
  if (now < window.window_start || now >= window.window_end()) return Millis{0};
  if (window.used < window.capacity) return Millis{0};
  return window.window_end() - now;
}

TweetRecord to_record(const RawTweet& t) {
  return TweetRecord{sanitize_field(format_api_time(t.creation_date)),
                     sanitize_field(t.id),
                     sanitize_field(t.lang),
                     sanitize_field(t.location),
                     sanitize_field(t.name),
                     sanitize_field(t.username),
                     sanitize_field(prefix_text(t))};
}

bool SeenIds::insert(const std::string& id) {
  const auto num = numeric_id(id);
  const bool fresh = num ? numeric_.insert(*num).second : other_.insert(id).second;
  if (!fresh) return false;
  order_.push_back(id);
  if (order_.size() > capacity_) {
    const std::string& oldest = order_.front();
    if (auto n = numeric_id(oldest)) {
      numeric_.erase(*n);
    } else {
      other_.erase(oldest);
    }
    order_.pop_front();
  }
  return true;
}

void CrawlWriter::write_page(Timestamp fetched_at, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  const std::string path = crawl_file_path(locator_for(fetched_at), root_);
  if (path != current_path_) {
    flush();
    out_.close();
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    out_.open(path, std::ios::out | std::ios::app | std::ios::binary);
    if (!out_) throw IoError("cannot open crawl file " + path);
    current_path_ = path;
    if (std::find(files_.begin(), files_.end(), path) == files_.end()) files_.push_back(path);
  }
  for (const std::string& line : lines) {
    out_ << line << '\n';
  }
  if (!out_) throw IoError("write failed for " + current_path_);
}

void CrawlWriter::flush() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw IoError("flush failed for " + current_path_);
  }
}

CrawlStats run_crawl(const CrawlConfig& cfg, SearchEndpoint& endpoint, Clock& clock) {
  validate(cfg);
  CrawlStats stats;
  SeenIds seen(cfg.dedup_capacity);
  CrawlWriter writer(cfg.out_dir);

  const Timestamp deadline = clock.now() + cfg.duration;
  RateWindow window;
  window.window_start = RateWindow::align(clock.now(), window.span);
  std::optional<std::string> token;
  Timestamp next_at = clock.now();

  while (true) {
    Timestamp now = clock.now();
    if (now >= deadline) break;
    if (cfg.max_requests && stats.requests >= *cfg.max_requests) break;
    if (now < next_at) {
      clock.sleep_for(next_at - now);
      continue;
    }
    window.roll(now);
    if (const Millis wait = throttle(window, now); wait.count() > 0) {
      ++stats.rate_limit_waits;
      clock.sleep_for(wait);
      continue;
    }

    std::optional<ApiPage> page;
    int attempt = 0;
    while (!page) {
      now = clock.now();
      try {
        ++window.used;
        page = endpoint.search(cfg.creds, cfg.page_count, cfg.use_next ? token : std::nullopt, now);
      } catch (const RateLimitError& e) {
        // Our window mirror disagreed with the server; trust the server.
        --window.used;
        ++stats.rate_limit_waits;
        window.window_start = e.reset_at() - window.span;
        window.used = window.capacity;
        clock.sleep_for(std::max(e.reset_at() - clock.now(), Millis{1}));
        window.roll(clock.now());
      } catch (const BadTokenError&) {
        ++stats.bad_tokens;
        token.reset();
      } catch (const NetworkError&) {
        --window.used;
        if (attempt >= cfg.max_retries) break;
        ++stats.network_retries;
        clock.sleep_for(cfg.initial_backoff * (1LL << attempt));
        ++attempt;
      }
    }
    next_at = now + cfg.interval;
    if (!page) {
      ++stats.pages_skipped;
      continue;
    }

    ++stats.requests;
    if (page->reset_at > Timestamp{}) {
      window.window_start = page->reset_at - window.span;
      window.used = window.capacity - page->remaining;
    }
    token = page->next;

    std::vector<std::string> lines;
    lines.reserve(page->tweets.size());
    for (const RawTweet& t : page->tweets) {
      ++stats.tweets_seen;
      if (is_blank(t.location)) {
        ++stats.filtered_no_location;
        continue;
      }
      if (!filter_tweet(t)) {
        ++stats.filtered_no_lang;
        continue;
      }
      TweetRecord record = to_record(t);
      if (record_violation(record)) {
        ++stats.malformed_dropped;
        continue;
      }
      if (!seen.insert(t.id)) {
        ++stats.duplicates_dropped;
        continue;
      }
      lines.push_back(encode_record(record));
      ++stats.tweets_kept;
    }
    writer.write_page(now, lines);
  }
  writer.flush();
  stats.files_written = writer.files();
  return stats;
}

}  // namespace twcrawl
