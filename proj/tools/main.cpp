// twcrawl: crawl -> process -> analyze -> prune, plus the privacy gateway,
// the compliance ledger and a local mock of the search service.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twcrawl/analyzer.hpp"
#include "twcrawl/clock.hpp"
#include "twcrawl/compliance_ledger.hpp"
#include "twcrawl/crawler.hpp"
#include "twcrawl/errors.hpp"
#include "twcrawl/firehose_server.hpp"
#include "twcrawl/gazetteer.hpp"
#include "twcrawl/http_endpoint.hpp"
#include "twcrawl/mock_firehose.hpp"
#include "twcrawl/privacy_gateway.hpp"
#include "twcrawl/processor.hpp"
#include "twcrawl/pruner.hpp"
#include "twcrawl/pseudonym_vault.hpp"

namespace fs = std::filesystem;
using namespace twcrawl;

namespace {

struct Globals {
  std::string data_dir{kDefaultDataRoot};
  std::uint64_t seed = 42;
  bool virtual_clock = false;
  std::string start = "2019-09-07T20:00:00Z";
};

// "90s", "15m", "1h", "8d", "500ms"; a bare number is seconds.
Millis parse_duration(const std::string& s) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--duration", "bad duration '" + s + "'");
  }
  const std::string unit = s.substr(used);
  double ms = 0;
  if (unit == "ms") ms = value;
  else if (unit.empty() || unit == "s") ms = value * 1000;
  else if (unit == "m") ms = value * 60'000;
  else if (unit == "h") ms = value * 3'600'000;
  else if (unit == "d") ms = value * 86'400'000;
  else throw CLI::ValidationError("--duration", "unknown unit in '" + s + "'");
  if (ms <= 0) throw CLI::ValidationError("--duration", "duration must be positive");
  return Millis{static_cast<std::int64_t>(ms)};
}

Timestamp start_time(const Globals& g) {
  const auto t = parse_iso8601(g.start);
  if (!t) throw CLI::ValidationError("--start", "expected ISO-8601 UTC time, got '" + g.start + "'");
  return *t;
}

std::unique_ptr<Clock> make_clock(const Globals& g, bool force_virtual = false) {
  if (g.virtual_clock || force_virtual) return std::make_unique<VirtualClock>(start_time(g));
  return std::make_unique<SystemClock>();
}

void print_stats(const CrawlStats& s, std::ostream& out) {
  out << "requests " << s.requests << "\n"
      << "tweets_seen " << s.tweets_seen << "\n"
      << "tweets_kept " << s.tweets_kept << "\n"
      << "duplicates_dropped " << s.duplicates_dropped << "\n"
      << "filtered_no_location " << s.filtered_no_location << "\n"
      << "filtered_no_lang " << s.filtered_no_lang << "\n"
      << "rate_limit_waits " << s.rate_limit_waits << "\n"
      << "network_retries " << s.network_retries << "\n"
      << "pages_skipped " << s.pages_skipped << "\n"
      << "files_written " << s.files_written.size() << "\n";
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- crawl ---------------------------------------------------------------

struct CrawlOpts {
  std::string endpoint;
  std::string key = "demo-key";
  std::string secret = "demo-secret";
  std::int64_t interval_ms = 2000;
  bool use_next = true;
  int count = kMaxPageSize;
  std::string duration = "1h";
  std::uint64_t max_requests = 0;
  std::string out;
  bool duplicate_mode = false;
  std::string mock_config;
};

void add_crawl_flags(CLI::App* cmd, CrawlOpts& o, bool with_endpoint) {
  if (with_endpoint) {
    cmd->add_option("--endpoint", o.endpoint,
                    "Search service base URL; empty runs an in-process mock");
    cmd->add_option("--key", o.key, "API key")->capture_default_str();
    cmd->add_option("--secret", o.secret, "API secret")->capture_default_str();
  }
  cmd->add_option("--interval-ms", o.interval_ms, "Pause between requests")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--use-next", o.use_next, "Follow the next-page token")->capture_default_str();
  cmd->add_option("--count", o.count, "Tweets per request")
      ->capture_default_str()
      ->check(CLI::Range(1, kMaxPageSize));
  cmd->add_option("--duration", o.duration, "Crawl length (500ms, 90s, 15m, 1h, 8d)")
      ->capture_default_str();
  cmd->add_option("--max-requests", o.max_requests, "Stop after N successful requests (0 = no cap)");
  cmd->add_flag("--duplicate-mode", o.duplicate_mode,
                "In-process mock only: re-serve recent tweets to cursor-less requests");
  cmd->add_option("--mock-config", o.mock_config, "In-process mock only: key = value config file");
}

CrawlConfig crawl_config(const CrawlOpts& o, const std::string& out_dir) {
  CrawlConfig cfg;
  cfg.creds = {o.key, o.secret};
  cfg.interval = Millis{o.interval_ms};
  cfg.use_next = o.use_next;
  cfg.page_count = o.count;
  cfg.duration = parse_duration(o.duration);
  if (o.max_requests > 0) cfg.max_requests = o.max_requests;
  cfg.out_dir = out_dir;
  validate(cfg);
  return cfg;
}

FirehoseConfig mock_config(const Globals& g, const CrawlOpts& o) {
  FirehoseConfig fc = o.mock_config.empty() ? FirehoseConfig{} : load_firehose_config(o.mock_config);
  if (o.mock_config.empty()) fc.seed = g.seed;
  if (o.duplicate_mode) fc.duplicate_mode = true;
  return fc;
}

CrawlStats crawl_in_process(const Globals& g, const CrawlOpts& o, const std::string& out_dir,
                            bool force_virtual) {
  const CrawlConfig cfg = crawl_config(o, out_dir);
  auto clock = make_clock(g, force_virtual);
  if (o.endpoint.empty()) {
    MockFirehose mock(mock_config(g, o));
    return run_crawl(cfg, mock, *clock);
  }
  HttpSearchEndpoint endpoint(o.endpoint, g.virtual_clock);
  return run_crawl(cfg, endpoint, *clock);
}

// ---- analyze -------------------------------------------------------------

std::vector<std::string> analyze_files(const std::vector<std::string>& inputs,
                                       const std::string& regex_file, const std::string& out_dir) {
  std::vector<AnalysisSpec> specs = builtin_specs();
  if (!regex_file.empty()) {
    for (auto& s : load_regex_specs(regex_file)) specs.push_back(std::move(s));
  }
  std::vector<ProcessedTweet> records;
  for (const auto& in : inputs) {
    auto part = load_processed_file(in);
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  const AnalysisResult result = analyze(records, specs);
  std::vector<std::string> written;
  for (const auto& spec : specs) {
    const auto it = result.find(spec.name);
    written.push_back(
        write_csv(spec.name, it == result.end() ? std::vector<AnalysisRow>{} : it->second, out_dir));
  }
  return written;
}

std::vector<std::string> processed_files_in(const std::string& dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        e.path().filename().string().find("-tweets-") != std::string::npos) {
      files.push_back(e.path().generic_string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- gateway -------------------------------------------------------------

struct GatewayOpts {
  std::vector<std::string> inputs;
  std::string rules;
  std::string registry;
  std::string out;
  std::string vault;
  std::string ledger;
  std::string recommendations;
  std::string sensitivity;
  std::vector<std::string> erase;
  std::string purpose = "recommendation";
  int retention_days = 30;
};

int run_gateway(const Globals& g, const GatewayOpts& o) {
  auto clock = make_clock(g);
  const std::string vault_path = o.vault.empty() ? (fs::path(g.data_dir) / "vault.jsonl").string() : o.vault;
  const std::string ledger_path =
      o.ledger.empty() ? (fs::path(g.data_dir) / "ledger.jsonl").string() : o.ledger;
  for (const auto& p : {vault_path, ledger_path}) {
    const auto parent = fs::path(p).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  PseudonymVault vault(*clock, vault_path);
  ComplianceLedger ledger(ledger_path, *clock);
  CategoryRules rules = o.rules.empty() ? CategoryRules::bundled() : CategoryRules::load(o.rules);
  PrivacyGateway gateway(vault, ledger, std::move(rules), {o.purpose, o.retention_days});

  if (!o.sensitivity.empty()) {
    // Validated up front so a bad policy fails before anything is released.
    const SensitivityPolicy policy = SensitivityPolicy::load(o.sensitivity);
    for (const char* f : {"name", "username", "id", "location", "city"}) {
      const auto label = policy.classify(f);
      std::cout << "field " << f << " " << to_string(label.label) << " "
                << to_string(*label.threat) << "\n";
    }
  }

  std::optional<std::ofstream> receipts;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    receipts.emplace((fs::path(o.out) / "receipts.jsonl").string(), std::ios::app);
    if (!*receipts) throw IoError("cannot write receipts under " + o.out);
  }

  if (!o.inputs.empty()) {
    if (o.registry.empty()) throw CLI::RequiredError("--registry");
    const ServiceRegistry registry = ServiceRegistry::load(o.registry);
    std::size_t tweets = 0, delivered = 0;
    for (const auto& in : o.inputs) {
      for (const ProcessedTweet& t : load_processed_file(in)) {
        ++tweets;
        for (const CategoryBundle& b : gateway.pseudonymize(t)) {
          const DeliveryReceipt r = gateway.dispatch(b, registry);
          ++delivered;
          if (receipts) {
            *receipts << nlohmann::ordered_json{{"code", b.code},
                                                {"category", to_string(r.category)},
                                                {"sink", r.sink},
                                                {"ledger_seq", r.ledger_seq}}
                             .dump()
                      << "\n";
          }
        }
      }
    }
    std::cout << "tweets " << tweets << "\nbundles_dispatched " << delivered << "\nusers "
              << vault.size() << "\n";
  }

  if (!o.recommendations.empty()) {
    // One {"code","category","item"} object per line; stale codes are dropped.
    std::istringstream lines(read_all(o.recommendations));
    std::optional<std::ofstream> remapped;
    if (!o.out.empty()) remapped.emplace((fs::path(o.out) / "remapped.jsonl").string());
    std::string line;
    std::size_t ok = 0, dropped = 0;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto category = parse_category(j.at("category").get<std::string>());
      if (!category) throw ParseError(ok + dropped + 1, "unknown category");
      Recommendation rec{j.at("code").get<std::string>(), *category, j.at("item").get<std::string>()};
      try {
        const auto [user, item] = gateway.remap(rec);
        ++ok;
        if (remapped) {
          *remapped << nlohmann::ordered_json{{"user", user}, {"category", to_string(rec.category)},
                                              {"item", item}}
                           .dump()
                    << "\n";
        }
      } catch (const UnknownCodeError&) {
        ++dropped;
      }
    }
    std::cout << "recommendations_remapped " << ok << "\nrecommendations_dropped " << dropped << "\n";
  }

  for (const auto& user : o.erase) {
    const ErasureReport r = gateway.erase_user(user);
    std::cout << "erased " << r.code << " ledger_seq " << r.ledger_seq << "\n";
  }
  return 0;
}

// ---- mock-serve ----------------------------------------------------------

int run_mock_serve(const Globals& g, const CrawlOpts& o, const std::string& host, int port,
                   const std::string& port_file) {
  // Block the shutdown signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  MockFirehose mock(mock_config(g, o));
  auto clock = make_clock(g);
  FirehoseServer server(mock, *clock, g.virtual_clock);
  const int bound = server.bind(host, port);
  if (!port_file.empty()) {
    const std::string tmp = port_file + ".tmp";
    std::ofstream(tmp) << bound << "\n";
    fs::rename(tmp, port_file);
  }
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  server.start();
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  std::cout << "stopped; generated " << mock.generated() << " tweets" << std::endl;
  return 0;
}

// "-regex" is a single-dash long flag; CLI11 wants two dashes.
std::vector<std::string> normalize_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) {
    std::string a = argv[i];
    if (a == "-regex" || a.rfind("-regex=", 0) == 0) a.insert(0, "-");
    args.push_back(std::move(a));
  }
  return args;  // CLI11 takes them reversed
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crawl, process, analyze and prune tweets; pseudonymize and audit disclosures."};
  app.name("twcrawl");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Globals g;
  app.add_option("--data-dir", g.data_dir, "Root for crawl and processed files")->capture_default_str();
  app.add_option("--seed", g.seed, "Mock service seed")->capture_default_str();
  app.add_flag("--virtual-clock", g.virtual_clock, "Run on simulated time starting at --start");
  app.add_option("--start", g.start, "Virtual clock start (ISO-8601 UTC)")->capture_default_str();

  // crawl
  CrawlOpts crawl_opts;
  auto* crawl = app.add_subcommand("crawl", "Fetch tweets and write <8>-delimited hourly files");
  add_crawl_flags(crawl, crawl_opts, true);
  crawl->add_option("--out", crawl_opts.out, "Output root (default: --data-dir)");

  // process
  std::string process_in, process_out, gazetteer_file;
  unsigned workers = 0;
  auto* process = app.add_subcommand("process", "Decode crawl files and detect locations");
  process->add_option("--in", process_in, "Crawl root (default: --data-dir)");
  process->add_option("--out", process_out, "Where processed JSON goes (default: --data-dir)");
  process->add_option("--gazetteer", gazetteer_file, "city,country,aliases CSV (default: bundled)");
  process->add_option("--workers", workers, "Worker threads (0 = one per core)");

  // analyze
  std::vector<std::string> analyze_in;
  std::string analyze_out, regex_file;
  auto* analyze_cmd = app.add_subcommand("analyze", "Count languages, countries, hashtags, mentions and regex hits");
  analyze_cmd->add_option("--in", analyze_in, "Processed JSON files")->required();
  analyze_cmd->add_option("--out", analyze_out, "CSV directory (default: <data-dir>/analysis)");
  analyze_cmd->add_option("--regex", regex_file, "File of 'name: pattern' lines (also -regex)");

  // prune
  std::string prune_in, prune_out, prune_order = "count_desc";
  std::size_t prune_limit = 100;
  auto* prune_cmd = app.add_subcommand("prune", "Keep the top rows of an analysis CSV");
  prune_cmd->add_option("--in", prune_in, "Analysis CSV")->required();
  prune_cmd->add_option("--out", prune_out, "Pruned CSV")->required();
  prune_cmd->add_option("--limit", prune_limit, "Rows to keep")->capture_default_str()->check(CLI::PositiveNumber);
  prune_cmd->add_option("--order", prune_order, "count_desc or key_asc")
      ->capture_default_str()
      ->check(CLI::IsMember({"count_desc", "key_asc"}));

  // gateway
  GatewayOpts gw;
  auto* gateway = app.add_subcommand("gateway", "Pseudonymize processed tweets and dispatch them by category");
  gateway->add_option("--in", gw.inputs, "Processed JSON files");
  gateway->add_option("--rules", gw.rules, "Category keyword rules (default: bundled)");
  gateway->add_option("--registry", gw.registry, "'category: [name=]dir-or-URL' lines");
  gateway->add_option("--out", gw.out, "Directory for receipts.jsonl and remapped.jsonl");
  gateway->add_option("--vault", gw.vault, "Vault file (default: <data-dir>/vault.jsonl)");
  gateway->add_option("--ledger", gw.ledger, "Ledger file (default: <data-dir>/ledger.jsonl)");
  gateway->add_option("--recommendations", gw.recommendations, "JSON lines {code, category, item} to map back");
  gateway->add_option("--sensitivity", gw.sensitivity, "'field: threat' policy overrides");
  gateway->add_option("--erase", gw.erase, "Erase these users (usernames)");
  gateway->add_option("--purpose", gw.purpose, "Disclosure purpose")->capture_default_str();
  gateway->add_option("--retention-days", gw.retention_days, "Disclosure retention")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // ledger
  std::string ledger_path, report_code, breach_codes;
  auto* ledger_cmd = app.add_subcommand("ledger", "Inspect or append to the compliance ledger");
  ledger_cmd->require_subcommand(1);
  ledger_cmd->add_option("--ledger", ledger_path, "Ledger file (default: <data-dir>/ledger.jsonl)");
  auto* report = ledger_cmd->add_subcommand("report", "Transparency report for one code");
  report->add_option("--code", report_code, "Pseudonym code")->required();
  auto* breach = ledger_cmd->add_subcommand("breach", "Record breach notices");
  breach->add_option("--codes", breach_codes, "Comma-separated codes")->required();

  // mock-serve
  CrawlOpts serve_opts;
  std::string serve_host = "127.0.0.1", port_file;
  int serve_port = 0;
  auto* serve = app.add_subcommand("mock-serve", "Serve the deterministic mock search API over HTTP");
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port, "0 picks a free port")->capture_default_str();
  serve->add_option("--port-file", port_file, "Write the bound port here");
  serve->add_option("--config", serve_opts.mock_config, "key = value config file");
  serve->add_flag("--duplicate-mode", serve_opts.duplicate_mode,
                  "Re-serve recent tweets to cursor-less requests");

  // pipeline
  CrawlOpts pipe_opts;
  pipe_opts.duration = "15m";
  std::string pipe_regex;
  std::size_t pipe_limit = 100;
  auto* pipeline = app.add_subcommand(
      "pipeline", "crawl -> process -> analyze -> prune against the in-process mock, on virtual time");
  add_crawl_flags(pipeline, pipe_opts, false);
  pipeline->add_option("--regex", pipe_regex, "Extra regex analyses (also -regex)");
  pipeline->add_option("--limit", pipe_limit, "Rows kept by prune")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(normalize_args(argc, argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*crawl) {
      const CrawlStats s =
          crawl_in_process(g, crawl_opts, crawl_opts.out.empty() ? g.data_dir : crawl_opts.out, false);
      print_stats(s, std::cout);
      return 0;
    }
    if (*process) {
      const Gazetteer gaz = gazetteer_file.empty() ? Gazetteer::bundled() : Gazetteer::load_csv(gazetteer_file);
      const auto results = process_directory(process_in.empty() ? g.data_dir : process_in, gaz,
                                             process_out.empty() ? g.data_dir : process_out, workers);
      std::size_t records = 0, skipped = 0;
      for (const auto& r : results) {
        records += r.records.size();
        skipped += r.skipped;
        std::cout << r.output_path << "\n";
      }
      std::cout << "files " << results.size() << "\nrecords " << records << "\nskipped " << skipped << "\n";
      return 0;
    }
    if (*analyze_cmd) {
      const std::string out = analyze_out.empty() ? (fs::path(g.data_dir) / "analysis").string() : analyze_out;
      for (const auto& p : analyze_files(analyze_in, regex_file, out)) std::cout << p << "\n";
      return 0;
    }
    if (*prune_cmd) {
      const std::size_t n = prune_file(prune_in, prune_out, {prune_limit, parse_prune_order(prune_order)});
      std::cout << "rows " << n << "\n";
      return 0;
    }
    if (*gateway) return run_gateway(g, gw);
    if (*ledger_cmd) {
      auto clock = make_clock(g);
      ComplianceLedger ledger(ledger_path.empty() ? (fs::path(g.data_dir) / "ledger.jsonl").string() : ledger_path,
                              *clock);
      if (*report) {
        std::cout << ledger.transparency_report(report_code).render();
      } else {
        std::vector<std::string> codes;
        std::stringstream ss(breach_codes);
        for (std::string c; std::getline(ss, c, ',');) {
          if (!c.empty()) codes.push_back(c);
        }
        for (auto seq : ledger.record_breach(codes)) std::cout << "seq " << seq << "\n";
      }
      return 0;
    }
    if (*serve) return run_mock_serve(g, serve_opts, serve_host, serve_port, port_file);
    if (*pipeline) {
      const CrawlStats s = crawl_in_process(g, pipe_opts, g.data_dir, true);
      print_stats(s, std::cout);
      const auto results = process_directory(g.data_dir, Gazetteer::bundled(), g.data_dir);
      std::vector<std::string> processed;
      for (const auto& r : results) processed.push_back(r.output_path);
      const fs::path analysis = fs::path(g.data_dir) / "analysis";
      const fs::path pruned = fs::path(g.data_dir) / "pruned";
      fs::create_directories(pruned);
      for (const auto& csv : analyze_files(processed, pipe_regex, analysis.string())) {
        const auto out = (pruned / fs::path(csv).filename()).string();
        prune_file(csv, out, {pipe_limit, PruneOrder::count_desc});
        std::cout << out << "\n";
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    // Option combinations only checkable after parsing.
    std::cerr << "twcrawl: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "twcrawl: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "twcrawl: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
