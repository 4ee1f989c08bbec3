#pragma once

#include "ragds/curate/manifest.hpp"
#include "ragds/curate/quality.hpp"
#include "ragds/curate/taxonomy.hpp"
#include "ragds/generate/qa_entry.hpp"

#include <span>
#include <vector>

namespace ragds::curate {

struct CurationSettings {
  double near_dup_threshold = 0.8;
  QualityRules rules;
};

struct CurationResult {
  std::vector<generate::QAEntry> accepted;
  DatasetManifest manifest;
};

/// exact_dedup -> near_dedup -> quality_filter -> balance_categories, with
/// per-category counts after every stage. Every entry must be raw and its
/// category must be in the taxonomy (UnknownCategory otherwise).
CurationResult curate(std::span<const generate::QAEntry> raw, const Taxonomy& taxonomy,
                      const CurationSettings& settings);

}  // namespace ragds::curate
