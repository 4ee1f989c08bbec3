#pragma once

#include "ragds/common/error.hpp"
#include "ragds/gateway/types.hpp"
#include "ragds/index/corpus.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ragds::judge {

class InsufficientChunks : public Error { public: using Error::Error; };
class BudgetExhausted : public Error { public: using Error::Error; };
class UnparsableJudgment : public Error { public: using Error::Error; };

struct Question {
  std::string question_id;
  std::string question;
  std::string source_chunk_id;

  bool operator==(const Question&) const = default;
};

struct EvalSettings {
  double question_temperature = 0.7;
  double answer_temperature = 0.0;
  double judge_temperature = 0.0;
  /// Extra chunk draws allowed to replace duplicate questions; 0 means n.
  std::size_t resample_budget = 0;
  std::size_t workers = 1;
};

/// `n` distinct positions from [0, population), uniformly without
/// replacement, as a prefix of a seeded Fisher-Yates shuffle (mt19937_64
/// with rejection sampling, so identical on every platform).
std::vector<std::size_t> seeded_permutation(std::size_t population, std::uint64_t seed);

/// Draws chunks without replacement and asks the generator for one exam
/// question per chunk, condensed into a standalone question. Duplicate
/// questions (after instruction normalization) are replaced by further
/// draws, up to the resample budget.
std::vector<Question> sample_questions(const index::Corpus& corpus, std::size_t n,
                                       gateway::Gateway& generator, std::uint64_t seed,
                                       const EvalSettings& settings = {});

/// User prompt that asks for a question about one chunk.
std::string question_prompt(const index::Chunk& chunk);

struct AnswerPair {
  std::string question_id;
  std::string answer_a;
  std::string answer_b;

  bool operator==(const AnswerPair&) const = default;
};

struct Exclusion {
  std::string question_id;
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

struct CollectedAnswers {
  std::vector<AnswerPair> pairs;
  std::vector<Exclusion> excluded;
};

std::vector<gateway::ChatTurn> answer_messages(std::string_view question);

/// Both candidates answer every question independently. A question whose
/// answer fails (after the gateway's retries) or comes back empty is
/// excluded with a note; the last error is rethrown only if every question
/// fails.
CollectedAnswers collect_answers(std::span<const Question> questions, gateway::Gateway& model_a,
                                 gateway::Gateway& model_b, const EvalSettings& settings = {});

struct Judgment {
  int score = 0;
  std::string rationale;
};

/// Strict parse of the last non-empty line: `SCORE: <integer>` with the
/// integer in [1, 10].
std::optional<int> parse_score(std::string_view reply);

std::string judge_prompt(std::string_view question, std::string_view answer,
                         std::string_view reference);
extern const std::string_view kReaskPrompt;

/// Scores one answer in isolation. A missing or out-of-range score gets
/// one re-ask in the same conversation, then UnparsableJudgment.
Judgment score_answer(std::string_view question, std::string_view answer, gateway::Gateway& judge,
                      std::string_view reference = {}, const EvalSettings& settings = {});

}  // namespace ragds::judge
