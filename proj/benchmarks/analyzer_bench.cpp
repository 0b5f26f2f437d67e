#include <benchmark/benchmark.h>

#include <twcrawl/analyzer.hpp>
#include <twcrawl/processor.hpp>
#include <twcrawl/pruner.hpp>

#include <random>

#include "bench_data.hpp"

using namespace twcrawl;

namespace {

std::vector<ProcessedTweet> processed(std::size_t n) {
  std::string text;
  for (const auto& r : stream_records(n)) text += encode_record(r) + "\n";
  return process_lines(text, Gazetteer::bundled()).records;
}

}  // namespace

static void BM_ProcessLines(benchmark::State& state) {
  std::string text;
  for (const auto& r : stream_records(static_cast<std::size_t>(state.range(0)))) text += encode_record(r) + "\n";
  for (auto _ : state) benchmark::DoNotOptimize(process_lines(text, Gazetteer::bundled()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProcessLines)->Arg(1000)->Arg(10000);

static void BM_AnalyzeBuiltins(benchmark::State& state) {
  const auto records = processed(static_cast<std::size_t>(state.range(0)));
  const auto specs = builtin_specs();
  for (auto _ : state) benchmark::DoNotOptimize(analyze(records, specs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalyzeBuiltins)->Arg(1000)->Arg(10000);

static void BM_AnalyzeRegex(benchmark::State& state) {
  const auto records = processed(10000);
  const auto specs = parse_regex_specs("retweets: ^RT @\\w+\nurls: https?://\\S+\n");
  for (auto _ : state) benchmark::DoNotOptimize(analyze(records, specs));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_AnalyzeRegex);

static void BM_Prune(benchmark::State& state) {
  std::vector<AnalysisRow> rows;
  std::mt19937_64 rng(5);
  for (int i = 0; i < state.range(0); ++i) rows.push_back({"k" + std::to_string(i), rng() % 1000});
  for (auto _ : state) benchmark::DoNotOptimize(prune(rows, PruneConfig{100, PruneOrder::count_desc}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Prune)->Arg(1000)->Arg(100000);
