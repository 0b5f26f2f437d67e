#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "twcrawl/analyzer.hpp"

namespace twcrawl {

enum class PruneOrder { count_desc, key_asc };

struct PruneConfig {
  std::size_t limit = 100;
  PruneOrder order = PruneOrder::count_desc;
};

// Top `limit` rows by the configured order; ties go to the smaller key.
// Throws std::invalid_argument when limit is 0.
std::vector<AnalysisRow> prune(std::vector<AnalysisRow> rows, const PruneConfig& cfg);

// Reads an analyzer CSV, prunes it, writes the result. Returns rows written.
std::size_t prune_file(const std::string& in_path, const std::string& out_path,
                       const PruneConfig& cfg);

PruneOrder parse_prune_order(std::string_view s);

}  // namespace twcrawl
