#pragma once

#include "ragds/common/error.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::curate {

class TaxonomyInvalid : public Error {
 public:
  using Error::Error;
};

class UnknownCategory : public Error {
 public:
  using Error::Error;
};

struct CategorySpec {
  std::string name;
  std::size_t target_count = 0;
  double target_percent = 0.0;
  std::vector<std::string> toc_headings;

  bool operator==(const CategorySpec&) const = default;
};

/// Ordered category list; order fixes output grouping everywhere.
struct Taxonomy {
  std::string name;
  std::size_t total_target = 0;
  std::vector<CategorySpec> categories;

  std::optional<std::size_t> find(std::string_view category) const;
  bool contains(std::string_view category) const { return find(category).has_value(); }
};

/// Parses the taxonomy JSON:
///   {"name": str, "total_target": int,
///    "categories": [{"name": str, "percent": num, "toc_headings": [str]}]}
/// target_count is derived as round(percent * total_target / 100).
/// Percents must sum to 100 within 0.01 and names must be unique.
Taxonomy parse_taxonomy(std::string_view json_bytes);

/// Same categories with targets recomputed for a different total.
Taxonomy rescale(const Taxonomy& taxonomy, std::size_t total_target);

}  // namespace ragds::curate
