#pragma once

#include "ragds/gateway/types.hpp"
#include "ragds/index/corpus.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::generate {

/// Rewrites a follow-up question into a standalone query using the chat
/// history. An empty history returns `new_query` unchanged without calling
/// the endpoint; otherwise exactly one chat call is made.
std::string condense_query(std::span<const gateway::ChatTurn> history, std::string_view new_query,
                           gateway::Gateway& chat);

/// The single user message condense_query sends for a non-empty history.
std::string condense_prompt(std::span<const gateway::ChatTurn> history, std::string_view new_query);

struct RetrievedContext {
  std::string context_text;
  std::vector<std::string> chunk_ids;
};

/// Embeds `query`, takes the top-k chunks and joins them in rank order,
/// each under a header naming its section trail.
RetrievedContext retrieve_context(const index::Corpus& corpus, std::string_view query,
                                  std::size_t k, gateway::Gateway& embedder);

/// Header + text block used for one retrieved chunk.
std::string format_chunk(const index::Chunk& chunk, int rank);

/// Retrieval query for a category: the matching top-level heading plus
/// that section's first paragraph. Headings match a candidate (the
/// toc_headings, or the category name when there are none) case-insensitively,
/// exact matches first, then containment. With no match the query is the
/// category name alone.
std::string category_query(std::string_view category, std::span<const std::string> toc_headings,
                           const index::Corpus& corpus);

}  // namespace ragds::generate
