#pragma once

#include "ragds/gateway/types.hpp"
#include "ragds/generate/prompt_template.hpp"
#include "ragds/generate/qa_entry.hpp"
#include "ragds/index/corpus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ragds::generate {

struct BatchTarget {
  std::size_t min = 60;
  std::size_t max = 100;
};

struct GenerationSettings {
  /// Pairs requested per generator call.
  std::size_t per_call = 10;
  /// Calls whose output yields no usable pair before giving up.
  std::size_t retry_budget = 10;
  std::size_t k = 4;
  double temperature = 0.7;
  int max_output_tokens = 4096;
  std::int64_t seed = 0;
};

struct BatchResult {
  std::vector<QAEntry> entries;
  std::size_t calls = 0;
  std::size_t failed_calls = 0;
  /// Set when the retry budget ran out before `min` entries; `entries`
  /// then holds the partial batch.
  bool budget_exhausted = false;
};

/// Messages for one generation call: the retrieved context as the system
/// turn, the rendered category prompt plus the per-call count as the user turn.
std::vector<gateway::ChatTurn> generation_messages(std::string_view rendered_prompt,
                                                   std::string_view context, std::size_t per_call);

/// Seed sent with call `call_index` of a category batch. Varies per call so
/// repeated calls on the same context can differ, yet is reproducible.
std::int64_t call_seed(std::int64_t base_seed, std::string_view category, std::size_t call_index);

/// Grounds the category prompt in retrieved context once, then calls the
/// generator until at least `target.min` entries are collected, keeping at
/// most `target.max`. Calls that yield no pair count against the retry
/// budget. Gateway errors propagate.
BatchResult generate_category_batch(std::string_view category, std::string_view retrieval_query,
                                    const BatchTarget& target, const index::Corpus& corpus,
                                    gateway::Gateway& generator, gateway::Gateway& embedder,
                                    const PromptTemplate& tmpl, const GenerationSettings& settings);

}  // namespace ragds::generate
