#include "ragds/curate/curator.hpp"

#include "ragds/curate/balance.hpp"
#include "ragds/curate/dedup.hpp"

#include <stdexcept>

namespace ragds::curate {
namespace {

template <typename Field>
void tally(std::span<const generate::QAEntry> entries, const Taxonomy& taxonomy,
           DatasetManifest& m, Field field) {
  for (const auto& e : entries) ++(m.categories[*taxonomy.find(e.category)].*field);
}

}  // namespace

CurationResult curate(std::span<const generate::QAEntry> raw, const Taxonomy& taxonomy,
                      const CurationSettings& settings) {
  for (const auto& e : raw) {
    if (e.status != generate::Status::Raw) throw std::invalid_argument("curate expects raw entries");
    if (!taxonomy.contains(e.category)) throw UnknownCategory("category not in taxonomy: " + e.category);
  }

  CurationResult result;
  auto& m = result.manifest;
  m.taxonomy = taxonomy.name;
  for (const auto& c : taxonomy.categories) {
    CategoryCounts counts;
    counts.name = c.name;
    counts.target = c.target_count;
    m.categories.push_back(std::move(counts));
  }

  tally(raw, taxonomy, m, &CategoryCounts::raw);
  const auto exact = exact_dedup(raw);
  tally(exact, taxonomy, m, &CategoryCounts::after_exact_dedup);
  const auto near = near_dedup(exact, settings.near_dup_threshold);
  tally(near, taxonomy, m, &CategoryCounts::after_near_dedup);
  auto filtered = quality_filter(near, settings.rules);
  tally(filtered.entries, taxonomy, m, &CategoryCounts::after_filter);
  m.filter_drops = filtered.stats;

  auto balanced = balance_categories(filtered.entries, taxonomy);
  for (std::size_t i = 0; i < balanced.outcomes.size(); ++i) {
    m.categories[i].accepted = balanced.outcomes[i].accepted;
    m.categories[i].shortfall = balanced.outcomes[i].shortfall;
  }
  recompute_totals(m);
  result.accepted = std::move(balanced.entries);
  return result;
}

}  // namespace ragds::curate
