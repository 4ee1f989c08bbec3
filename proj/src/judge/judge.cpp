#include "ragds/judge/judge.hpp"

#include "ragds/common/parallel.hpp"
#include "ragds/common/text.hpp"
#include "ragds/generate/batch.hpp"
#include "ragds/generate/retrieval_chain.hpp"

#include <cstdio>
#include <random>
#include <regex>
#include <unordered_set>

namespace ragds::judge {
namespace {

using gateway::ChatTurn;
using gateway::Role;

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::string question_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q-%04zu", i + 1);
  return buf;
}

std::string trim(std::string_view s) { return text::normalize_whitespace(s); }

}  // namespace

const std::string_view kReaskPrompt =
    "Your reply did not end with a valid score line. Reply again with a brief rationale and "
    "finish with a final line of exactly this form:\nSCORE: <integer from 1 to 10>";

std::vector<std::size_t> seeded_permutation(std::size_t population, std::uint64_t seed) {
  std::vector<std::size_t> order(population);
  for (std::size_t i = 0; i < population; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i + 1 < population; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, population - i));
    std::swap(order[i], order[j]);
  }
  return order;
}

std::string question_prompt(const index::Chunk& chunk) {
  return "Source passage:\n" + generate::format_chunk(chunk, 1) +
         "\n\nWrite one exam-style question that tests understanding of this passage and can be "
         "answered from it. Reply with the question only.";
}

std::vector<Question> sample_questions(const index::Corpus& corpus, std::size_t n,
                                       gateway::Gateway& generator, std::uint64_t seed,
                                       const EvalSettings& settings) {
  if (n == 0) throw std::invalid_argument("n must be > 0");
  if (corpus.size() < n) {
    throw InsufficientChunks("need " + std::to_string(n) + " chunks, corpus has " +
                             std::to_string(corpus.size()));
  }
  const auto order = seeded_permutation(corpus.size(), seed);
  const std::size_t budget = settings.resample_budget == 0 ? n : settings.resample_budget;
  const std::size_t max_draws = std::min(corpus.size(), n + budget);

  std::vector<Question> questions;
  std::unordered_set<std::string> seen;
  for (std::size_t draw = 0; draw < max_draws && questions.size() < n; ++draw) {
    const auto& chunk = corpus.chunks()[order[draw]];
    const std::vector<ChatTurn> messages{{Role::User, question_prompt(chunk)}};
    gateway::CompletionParams params;
    params.temperature = settings.question_temperature;
    params.max_output_tokens = 256;
    params.seed = generate::call_seed(static_cast<std::int64_t>(seed), "question", draw);
    const auto raw = trim(generator.chat_complete(messages, params).text);
    if (raw.empty()) continue;

    const std::vector<ChatTurn> history{messages.front(), {Role::Assistant, raw}};
    auto standalone = trim(generate::condense_query(history, raw, generator));
    if (standalone.empty()) continue;
    if (!seen.insert(text::normalize_instruction(standalone)).second) continue;
    questions.push_back({question_id(questions.size()), std::move(standalone), chunk.chunk_id});
  }
  if (questions.size() < n) {
    throw BudgetExhausted("only " + std::to_string(questions.size()) + " distinct questions after " +
                          std::to_string(max_draws) + " draws");
  }
  return questions;
}

std::vector<ChatTurn> answer_messages(std::string_view question) {
  return {{Role::System, "Answer the question accurately and concisely."},
          {Role::User, std::string(question)}};
}

CollectedAnswers collect_answers(std::span<const Question> questions, gateway::Gateway& model_a,
                                 gateway::Gateway& model_b, const EvalSettings& settings) {
  if (questions.empty()) throw std::invalid_argument("questions must be non-empty");

  struct Slot {
    std::optional<AnswerPair> pair;
    std::string reason;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(questions.size());
  gateway::CompletionParams params;
  params.temperature = settings.answer_temperature;

  parallel_for(questions.size(), settings.workers, [&](std::size_t i) {
    const auto& q = questions[i];
    const auto messages = answer_messages(q.question);
    auto ask = [&](gateway::Gateway& g, const char* label) -> std::optional<std::string> {
      try {
        auto text = g.chat_complete(messages, params).text;
        if (trim(text).empty()) {
          slots[i].reason = std::string("model ") + label + " returned an empty answer";
          return std::nullopt;
        }
        return text;
      } catch (const gateway::GatewayError& e) {
        slots[i].reason = std::string("model ") + label + " failed: " + e.what();
        slots[i].error = std::current_exception();
        return std::nullopt;
      }
    };
    auto a = ask(model_a, "A");
    if (!a) return;
    auto b = ask(model_b, "B");
    if (!b) return;
    slots[i].pair = AnswerPair{q.question_id, std::move(*a), std::move(*b)};
  });

  CollectedAnswers out;
  std::exception_ptr last_error;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].pair) {
      out.pairs.push_back(std::move(*slots[i].pair));
    } else {
      out.excluded.push_back({questions[i].question_id, slots[i].reason});
      if (slots[i].error) last_error = slots[i].error;
    }
  }
  if (out.pairs.empty() && last_error) std::rethrow_exception(last_error);
  return out;
}

std::optional<int> parse_score(std::string_view reply) {
  std::size_t end = reply.size();
  while (end > 0) {
    std::size_t start = reply.rfind('\n', end - 1);
    start = start == std::string_view::npos ? 0 : start + 1;
    const auto line = trim(reply.substr(start, end - start));
    if (!line.empty()) {
      static const std::regex kScore(R"(^SCORE:\s*([0-9]{1,3})$)");
      std::smatch m;
      if (!std::regex_match(line, m, kScore)) return std::nullopt;
      const int v = std::stoi(m[1].str());
      if (v < 1 || v > 10) return std::nullopt;
      return v;
    }
    if (start == 0) break;
    end = start - 1;
  }
  return std::nullopt;
}

std::string judge_prompt(std::string_view question, std::string_view answer,
                         std::string_view reference) {
  std::string p = "You are an expert examiner. Grade the answer below.\n\nQuestion:\n";
  p.append(question);
  if (!reference.empty()) {
    p.append("\n\nReference material:\n");
    p.append(reference);
  }
  p.append("\n\nAnswer to grade:\n");
  p.append(answer);
  p.append(
      "\n\nJudge the answer on accuracy with respect to the reference material, completeness, and "
      "clarity. Write a short rationale, then finish with a final line of exactly this form:\n"
      "SCORE: <integer from 1 to 10>");
  return p;
}

Judgment score_answer(std::string_view question, std::string_view answer, gateway::Gateway& judge,
                      std::string_view reference, const EvalSettings& settings) {
  if (trim(answer).empty()) throw std::invalid_argument("answer must be non-empty");

  std::vector<ChatTurn> messages{{Role::User, judge_prompt(question, answer, reference)}};
  gateway::CompletionParams params;
  params.temperature = settings.judge_temperature;
  params.max_output_tokens = 512;

  for (int round = 0; round < 2; ++round) {
    const auto reply = judge.chat_complete(messages, params).text;
    if (auto score = parse_score(reply)) {
      const auto cut = reply.rfind("SCORE:");
      return {*score, trim(reply.substr(0, cut))};
    }
    messages.push_back({Role::Assistant, reply});
    messages.push_back({Role::User, std::string(kReaskPrompt)});
  }
  throw UnparsableJudgment("judge gave no valid SCORE line after a re-ask");
}

}  // namespace ragds::judge
