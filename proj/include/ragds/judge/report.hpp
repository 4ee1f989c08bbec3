#pragma once

#include "ragds/judge/judge.hpp"

#include <span>
#include <string>
#include <vector>

namespace ragds::judge {

struct JudgeRecord {
  std::string question_id;
  std::string question;
  std::string answer_a;
  std::string answer_b;
  int score_a = 0;
  int score_b = 0;
  std::string judge_model;
  std::string rationale_a;
  std::string rationale_b;

  bool operator==(const JudgeRecord&) const = default;
};

struct EvalReport {
  std::string model_a;
  std::string model_b;
  std::string judge_model;
  std::size_t n_questions = 0;
  long total_a = 0;
  long total_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// From A's point of view.
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  std::vector<JudgeRecord> records;
  std::vector<Exclusion> excluded;

  bool operator==(const EvalReport&) const = default;
};

/// Totals, means and win/tie/loss over the records. Throws
/// std::invalid_argument if a score lies outside [1, 10].
EvalReport aggregate_scores(std::span<const JudgeRecord> records);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view bytes);

/// Fixed-width text table: one row per question, then totals and means.
std::string report_table(const EvalReport& report);

struct EvalEndpoints {
  gateway::Gateway& question_generator;
  gateway::Gateway& model_a;
  gateway::Gateway& model_b;
  gateway::Gateway& judge;
};

/// sample_questions -> collect_answers -> score each answer separately ->
/// aggregate_scores. Questions whose judging fails are excluded with a note.
EvalReport run_evaluation(const index::Corpus& corpus, std::size_t n, std::uint64_t seed,
                          const EvalEndpoints& endpoints, const EvalSettings& settings = {});

}  // namespace ragds::judge
