#pragma once

#include "ragds/curate/taxonomy.hpp"
#include "ragds/generate/qa_entry.hpp"

#include <span>
#include <vector>

namespace ragds::curate {

struct CategoryOutcome {
  std::string name;
  std::size_t available = 0;
  std::size_t accepted = 0;
  std::size_t shortfall = 0;
};

struct BalanceResult {
  std::vector<generate::QAEntry> entries;
  /// One per taxonomy category, in taxonomy order.
  std::vector<CategoryOutcome> outcomes;
};

/// Keeps the first target_count entries of each category (all of them on
/// undersupply, recording the shortfall) and groups the output by taxonomy
/// order. Throws UnknownCategory for an entry outside the taxonomy.
BalanceResult balance_categories(std::span<const generate::QAEntry> entries,
                                 const Taxonomy& taxonomy);

}  // namespace ragds::curate
