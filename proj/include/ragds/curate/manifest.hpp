#pragma once

#include "ragds/curate/quality.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace ragds::curate {

struct CategoryCounts {
  std::string name;
  std::size_t target = 0;
  std::size_t raw = 0;
  std::size_t after_exact_dedup = 0;
  std::size_t after_near_dedup = 0;
  std::size_t after_filter = 0;
  std::size_t accepted = 0;
  std::size_t shortfall = 0;
  double achieved_percent = 0.0;

  bool operator==(const CategoryCounts&) const = default;
};

struct StageTotals {
  std::size_t raw = 0;
  std::size_t after_exact_dedup = 0;
  std::size_t after_near_dedup = 0;
  std::size_t after_filter = 0;
  std::size_t accepted = 0;

  bool operator==(const StageTotals&) const = default;
};

/// Composition of an exported dataset and the knobs that produced it.
struct DatasetManifest {
  std::string taxonomy;
  std::string format;
  std::vector<CategoryCounts> categories;
  StageTotals totals;
  FilterStats filter_drops;
  /// Whitespace tokens over instructions and outputs of accepted entries.
  std::size_t word_count = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();

  bool operator==(const DatasetManifest&) const = default;
};

/// Sums per-category stage counts into totals and sets each category's
/// share of accepted entries (all zero when nothing was accepted).
void recompute_totals(DatasetManifest& m);

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(std::string_view bytes);

}  // namespace ragds::curate
