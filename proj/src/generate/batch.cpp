#include "ragds/generate/batch.hpp"

#include "ragds/common/hash.hpp"
#include "ragds/generate/qa_extract.hpp"
#include "ragds/generate/retrieval_chain.hpp"

#include <stdexcept>

namespace ragds::generate {

std::vector<gateway::ChatTurn> generation_messages(std::string_view rendered_prompt,
                                                   std::string_view context, std::size_t per_call) {
  std::string system =
      "You are building a question-and-answer dataset from a reference document. Use only the "
      "context below; do not add facts that it does not support.\n\nContext:\n";
  system.append(context);

  std::string user(rendered_prompt);
  while (!user.empty() && user.back() == '\n') user.pop_back();
  user.append("\n\nReturn ");
  user.append(std::to_string(per_call));
  user.append(" different question-answer pairs as a JSON array of objects in that format.");
  return {{gateway::Role::System, std::move(system)}, {gateway::Role::User, std::move(user)}};
}

std::int64_t call_seed(std::int64_t base_seed, std::string_view category, std::size_t call_index) {
  const std::string key = std::to_string(base_seed) + "\x1f" + std::string(category) + "\x1f" +
                          std::to_string(call_index);
  return static_cast<std::int64_t>(sha256_u64(key) >> 1);
}

BatchResult generate_category_batch(std::string_view category, std::string_view retrieval_query,
                                    const BatchTarget& target, const index::Corpus& corpus,
                                    gateway::Gateway& generator, gateway::Gateway& embedder,
                                    const PromptTemplate& tmpl, const GenerationSettings& settings) {
  if (settings.retry_budget < 1) throw std::invalid_argument("retry_budget must be >= 1");
  if (settings.per_call < 1) throw std::invalid_argument("per_call must be >= 1");
  if (target.min > target.max) throw std::invalid_argument("target min exceeds max");

  const std::string prompt = render_category_prompt(tmpl, category);
  const auto ctx = retrieve_context(corpus, retrieval_query, settings.k, embedder);

  BatchResult result;
  while (result.entries.size() < target.min) {
    if (result.failed_calls >= settings.retry_budget) {
      result.budget_exhausted = true;
      break;
    }
    const auto messages = generation_messages(prompt, ctx.context_text, settings.per_call);
    gateway::CompletionParams params;
    params.temperature = settings.temperature;
    params.max_output_tokens = settings.max_output_tokens;
    params.seed = call_seed(settings.seed, category, result.calls);
    ++result.calls;

    const auto response = generator.chat_complete(messages, params);
    std::vector<QAPair> pairs;
    try {
      pairs = extract_qa_objects(response.text);
    } catch (const MalformedGeneration&) {
      ++result.failed_calls;
      continue;
    }

    const std::string hash = gateway::prompt_hash(messages);
    for (auto& pair : pairs) {
      if (result.entries.size() >= target.max) break;
      QAEntry e;
      e.instruction = std::move(pair.instruction);
      e.output = std::move(pair.output);
      e.category = std::string(category);
      e.source_chunk_ids = ctx.chunk_ids;
      e.gen_meta = {generator.profile().model, settings.temperature, hash};
      e.status = Status::Raw;
      result.entries.push_back(std::move(e));
    }
  }
  return result;
}

}  // namespace ragds::generate
