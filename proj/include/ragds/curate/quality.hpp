#pragma once

#include "ragds/generate/qa_entry.hpp"

#include <span>
#include <string>
#include <vector>

namespace ragds::curate {

struct QualityRules {
  std::size_t min_instruction_chars = 12;
  std::size_t min_output_chars = 20;
  /// Matched case-insensitively anywhere in the output.
  std::vector<std::string> refusal_phrases = default_refusal_phrases();

  static std::vector<std::string> default_refusal_phrases();
};

/// Per-rule drop counts. An entry is charged to the first rule it breaks,
/// in the order listed here.
struct FilterStats {
  std::size_t short_instruction = 0;
  std::size_t short_output = 0;
  std::size_t refusal = 0;

  std::size_t total() const { return short_instruction + short_output + refusal; }
  bool operator==(const FilterStats&) const = default;
};

struct FilterResult {
  std::vector<generate::QAEntry> entries;
  FilterStats stats;
};

/// Lengths are counted in UTF-8 code points. Survivors move to status filtered.
FilterResult quality_filter(std::span<const generate::QAEntry> entries, const QualityRules& rules);

}  // namespace ragds::curate
