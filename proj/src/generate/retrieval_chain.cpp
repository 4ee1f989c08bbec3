#include "ragds/generate/retrieval_chain.hpp"

#include "ragds/common/text.hpp"

#include <optional>

namespace ragds::generate {

std::string condense_prompt(std::span<const gateway::ChatTurn> history, std::string_view new_query) {
  std::string prompt =
      "Given the conversation below and a follow-up question, rewrite the follow-up as a "
      "standalone question that can be understood without the conversation. Reply with the "
      "standalone question only.\n\nConversation:\n";
  for (const auto& turn : history) {
    prompt.append(gateway::to_string(turn.role));
    prompt.append(": ");
    prompt.append(turn.content);
    prompt.push_back('\n');
  }
  prompt.append("\nFollow-up question: ");
  prompt.append(new_query);
  prompt.append("\nStandalone question:");
  return prompt;
}

std::string condense_query(std::span<const gateway::ChatTurn> history, std::string_view new_query,
                           gateway::Gateway& chat) {
  if (history.empty()) return std::string(new_query);
  const std::vector<gateway::ChatTurn> messages{
      {gateway::Role::User, condense_prompt(history, new_query)}};
  gateway::CompletionParams params;
  params.temperature = 0.0;
  params.max_output_tokens = 256;
  auto rewritten = text::normalize_whitespace(chat.chat_complete(messages, params).text);
  return rewritten.empty() ? std::string(new_query) : rewritten;
}

std::string format_chunk(const index::Chunk& chunk, int rank) {
  std::vector<std::string> labels;
  for (auto p : chunk.section_path) labels.push_back(std::to_string(p + 1));
  std::string out = "[" + std::to_string(rank) + "] ";
  out += chunk.heading_trail.empty() ? "section " + text::join(labels, ".")
                                     : text::join(chunk.heading_trail, " > ");
  out += "\n";
  out += chunk.text;
  return out;
}

RetrievedContext retrieve_context(const index::Corpus& corpus, std::string_view query,
                                  std::size_t k, gateway::Gateway& embedder) {
  if (corpus.index().empty()) throw index::EmptyIndex("retrieval over an empty index");
  const std::vector<std::string> texts{std::string(query)};
  const auto vectors = embedder.embed_texts(texts);
  const auto hits = corpus.index().search_top_k(vectors.front(), k);

  RetrievedContext ctx;
  std::vector<std::string> blocks;
  for (const auto& hit : hits) {
    blocks.push_back(format_chunk(corpus.chunk(hit.chunk_id), hit.rank));
    ctx.chunk_ids.push_back(hit.chunk_id);
  }
  ctx.context_text = text::join(blocks, "\n\n---\n\n");
  return ctx;
}

std::string category_query(std::string_view category, std::span<const std::string> toc_headings,
                           const index::Corpus& corpus) {
  std::vector<std::string> candidates(toc_headings.begin(), toc_headings.end());
  if (candidates.empty()) candidates.emplace_back(category);

  // First chunk of each top-level section, in document order.
  std::vector<const index::Chunk*> tops;
  for (const auto& c : corpus.chunks()) {
    if (c.section_path.size() != 1 || c.heading_trail.empty()) continue;
    if (!tops.empty() && tops.back()->section_path == c.section_path) continue;
    tops.push_back(&c);
  }

  auto find = [&](bool exact) -> const index::Chunk* {
    for (const auto& cand : candidates) {
      const auto want = text::to_lower_ascii(cand);
      for (const auto* c : tops) {
        const auto heading = text::to_lower_ascii(c->heading_trail.front());
        if (exact ? heading == want : heading.find(want) != std::string::npos) return c;
      }
    }
    return nullptr;
  };
  const index::Chunk* match = find(true);
  if (!match) match = find(false);
  if (!match) return std::string(category);

  const auto& body = match->text;
  const auto first_para = body.substr(0, body.find("\n\n"));
  return match->heading_trail.front() + " " + first_para;
}

}  // namespace ragds::generate
