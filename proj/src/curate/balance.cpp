#include "ragds/curate/balance.hpp"

namespace ragds::curate {

BalanceResult balance_categories(std::span<const generate::QAEntry> entries,
                                 const Taxonomy& taxonomy) {
  std::vector<std::vector<const generate::QAEntry*>> buckets(taxonomy.categories.size());
  for (const auto& e : entries) {
    auto idx = taxonomy.find(e.category);
    if (!idx) throw UnknownCategory("category not in taxonomy: " + e.category);
    buckets[*idx].push_back(&e);
  }

  BalanceResult result;
  for (std::size_t c = 0; c < buckets.size(); ++c) {
    const auto& spec = taxonomy.categories[c];
    CategoryOutcome outcome{spec.name, buckets[c].size(), 0, 0};
    const std::size_t keep = std::min(spec.target_count, buckets[c].size());
    for (std::size_t i = 0; i < keep; ++i) {
      result.entries.push_back(*buckets[c][i]);
      generate::advance(result.entries.back(), generate::Status::Accepted);
    }
    outcome.accepted = keep;
    outcome.shortfall = spec.target_count - keep;
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

}  // namespace ragds::curate
