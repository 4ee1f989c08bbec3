#pragma once

#include "ragds/generate/qa_entry.hpp"

#include <span>
#include <string>
#include <vector>

namespace ragds::curate {

using generate::QAEntry;

/// Drops entries whose normalized instruction (lowercase, collapsed
/// whitespace, trailing punctuation stripped) repeats an earlier one.
/// Survivors keep their order and move to status deduped.
std::vector<QAEntry> exact_dedup(std::span<const QAEntry> entries);

/// Lowercased words with surrounding punctuation removed, joined into
/// 3-word shingles. Fewer than three words give one shingle of all of them.
std::vector<std::string> instruction_shingles(std::string_view instruction);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Greedy near-duplicate removal: walking in order, an entry is dropped when
/// its shingle Jaccard similarity with any earlier survivor is >= threshold.
/// Throws std::invalid_argument unless threshold is in (0, 1].
std::vector<QAEntry> near_dedup(std::span<const QAEntry> entries, double threshold);

}  // namespace ragds::curate
