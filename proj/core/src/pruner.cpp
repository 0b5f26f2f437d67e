#include "twcrawl/pruner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "twcrawl/csv.hpp"
#include "twcrawl/errors.hpp"

namespace twcrawl {

std::vector<AnalysisRow> prune(std::vector<AnalysisRow> rows, const PruneConfig& cfg) {
  if (cfg.limit == 0) throw std::invalid_argument("prune limit must be at least 1");
  auto by_count = [](const AnalysisRow& a, const AnalysisRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  };
  auto by_key = [](const AnalysisRow& a, const AnalysisRow& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.count > b.count;
  };
  const std::size_t keep = std::min(cfg.limit, rows.size());
  if (cfg.order == PruneOrder::count_desc) {
    std::stable_sort(rows.begin(), rows.end(), by_count);
  } else {
    std::stable_sort(rows.begin(), rows.end(), by_key);
  }
  rows.resize(keep);
  return rows;
}

std::size_t prune_file(const std::string& in_path, const std::string& out_path,
                       const PruneConfig& cfg) {
  const auto rows = prune(read_csv(in_path), cfg);
  const std::filesystem::path p(out_path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  // rows_to_csv re-sorts by count, so key order is serialized by hand.
  if (cfg.order == PruneOrder::count_desc) {
    out << rows_to_csv(rows);
  } else {
    out << "key,count\n";
    for (const AnalysisRow& r : rows) {
      out << csv::quote_field(r.key) << ',' << r.count << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError("write failed for " + out_path);
  return rows.size();
}

PruneOrder parse_prune_order(std::string_view s) {
  if (s == "count_desc") return PruneOrder::count_desc;
  if (s == "key_asc") return PruneOrder::key_asc;
  throw std::invalid_argument("order must be count_desc or key_asc");
}

}  // namespace twcrawl
