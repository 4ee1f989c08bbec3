#include "ragds/judge/report.hpp"

#include "ragds/common/error.hpp"
#include "ragds/common/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>

namespace ragds::judge {

EvalReport aggregate_scores(std::span<const JudgeRecord> records) {
  EvalReport r;
  for (const auto& rec : records) {
    for (int s : {rec.score_a, rec.score_b}) {
      if (s < 1 || s > 10) {
        throw std::invalid_argument("score out of range for " + rec.question_id);
      }
    }
    r.total_a += rec.score_a;
    r.total_b += rec.score_b;
    if (rec.score_a > rec.score_b) {
      ++r.wins;
    } else if (rec.score_a == rec.score_b) {
      ++r.ties;
    } else {
      ++r.losses;
    }
    if (r.judge_model.empty()) r.judge_model = rec.judge_model;
  }
  r.n_questions = records.size();
  if (r.n_questions > 0) {
    r.mean_a = static_cast<double>(r.total_a) / static_cast<double>(r.n_questions);
    r.mean_b = static_cast<double>(r.total_b) / static_cast<double>(r.n_questions);
  }
  r.records.assign(records.begin(), records.end());
  return r;
}

std::string report_to_json(const EvalReport& report) {
  using oj = nlohmann::ordered_json;
  oj questions = oj::array();
  for (const auto& rec : report.records) {
    oj q;
    q["question_id"] = rec.question_id;
    q["question"] = rec.question;
    q["answer_a"] = rec.answer_a;
    q["answer_b"] = rec.answer_b;
    q["score_a"] = rec.score_a;
    q["score_b"] = rec.score_b;
    q["judge_model"] = rec.judge_model;
    q["rationale_a"] = rec.rationale_a;
    q["rationale_b"] = rec.rationale_b;
    questions.push_back(std::move(q));
  }
  oj excluded = oj::array();
  for (const auto& e : report.excluded) {
    excluded.push_back({{"question_id", e.question_id}, {"reason", e.reason}});
  }
  oj j;
  j["model_a"] = report.model_a;
  j["model_b"] = report.model_b;
  j["judge_model"] = report.judge_model;
  j["n_questions"] = report.n_questions;
  j["total_a"] = report.total_a;
  j["total_b"] = report.total_b;
  j["mean_a"] = report.mean_a;
  j["mean_b"] = report.mean_b;
  j["wins"] = report.wins;
  j["ties"] = report.ties;
  j["losses"] = report.losses;
  j["questions"] = std::move(questions);
  j["excluded"] = std::move(excluded);
  return j.dump(2, ' ', false, oj::error_handler_t::replace) + "\n";
}

EvalReport report_from_json(std::string_view bytes) {
  try {
    const auto j = nlohmann::json::parse(bytes);
    EvalReport r;
    r.model_a = j.at("model_a").get<std::string>();
    r.model_b = j.at("model_b").get<std::string>();
    r.judge_model = j.at("judge_model").get<std::string>();
    r.n_questions = j.at("n_questions").get<std::size_t>();
    r.total_a = j.at("total_a").get<long>();
    r.total_b = j.at("total_b").get<long>();
    r.mean_a = j.at("mean_a").get<double>();
    r.mean_b = j.at("mean_b").get<double>();
    r.wins = j.at("wins").get<std::size_t>();
    r.ties = j.at("ties").get<std::size_t>();
    r.losses = j.at("losses").get<std::size_t>();
    for (const auto& q : j.at("questions")) {
      r.records.push_back({q.at("question_id").get<std::string>(), q.at("question").get<std::string>(),
                           q.at("answer_a").get<std::string>(), q.at("answer_b").get<std::string>(),
                           q.at("score_a").get<int>(), q.at("score_b").get<int>(),
                           q.at("judge_model").get<std::string>(),
                           q.at("rationale_a").get<std::string>(),
                           q.at("rationale_b").get<std::string>()});
    }
    for (const auto& e : j.at("excluded")) {
      r.excluded.push_back({e.at("question_id").get<std::string>(), e.at("reason").get<std::string>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("eval report: ") + e.what());
  }
}

std::string report_table(const EvalReport& report) {
  std::string out;
  char line[160];
  const auto label = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
  std::snprintf(line, sizeof line, "%-10s %18s %18s\n", "question", label(report.model_a).substr(0, 18).c_str(),
                label(report.model_b).substr(0, 18).c_str());
  out += line;
  out += std::string(48, '-') + "\n";
  for (const auto& r : report.records) {
    std::snprintf(line, sizeof line, "%-10s %18d %18d\n", r.question_id.c_str(), r.score_a, r.score_b);
    out += line;
  }
  out += std::string(48, '-') + "\n";
  std::snprintf(line, sizeof line, "%-10s %18ld %18ld\n", "total", report.total_a, report.total_b);
  out += line;
  std::snprintf(line, sizeof line, "%-10s %18.2f %18.2f\n", "mean", report.mean_a, report.mean_b);
  out += line;
  std::snprintf(line, sizeof line, "A wins %zu, ties %zu, B wins %zu over %zu questions (judge: %s)\n",
                report.wins, report.ties, report.losses, report.n_questions,
                label(report.judge_model).c_str());
  out += line;
  for (const auto& e : report.excluded) out += "excluded " + e.question_id + ": " + e.reason + "\n";
  return out;
}

EvalReport run_evaluation(const index::Corpus& corpus, std::size_t n, std::uint64_t seed,
                          const EvalEndpoints& endpoints, const EvalSettings& settings) {
  const auto questions = sample_questions(corpus, n, endpoints.question_generator, seed, settings);
  auto answers = collect_answers(questions, endpoints.model_a, endpoints.model_b, settings);

  std::map<std::string, const Question*> by_id;
  for (const auto& q : questions) by_id[q.question_id] = &q;

  struct Slot {
    std::optional<JudgeRecord> record;
    std::string reason;
  };
  std::vector<Slot> slots(answers.pairs.size());
  parallel_for(answers.pairs.size(), settings.workers, [&](std::size_t i) {
    const auto& pair = answers.pairs[i];
    const Question& q = *by_id.at(pair.question_id);
    const auto& reference = corpus.chunk(q.source_chunk_id).text;
    try {
      const auto ja = score_answer(q.question, pair.answer_a, endpoints.judge, reference, settings);
      const auto jb = score_answer(q.question, pair.answer_b, endpoints.judge, reference, settings);
      slots[i].record = JudgeRecord{q.question_id, q.question,   pair.answer_a,
                                    pair.answer_b, ja.score,     jb.score,
                                    endpoints.judge.profile().model, ja.rationale, jb.rationale};
    } catch (const Error& e) {
      slots[i].reason = std::string("judging failed: ") + e.what();
    }
  });

  std::vector<JudgeRecord> records;
  std::vector<Exclusion> excluded = answers.excluded;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].record) {
      records.push_back(std::move(*slots[i].record));
    } else {
      excluded.push_back({answers.pairs[i].question_id, slots[i].reason});
    }
  }
  std::sort(excluded.begin(), excluded.end(),
            [](const Exclusion& a, const Exclusion& b) { return a.question_id < b.question_id; });

  auto report = aggregate_scores(records);
  report.model_a = endpoints.model_a.profile().model;
  report.model_b = endpoints.model_b.profile().model;
  report.judge_model = endpoints.judge.profile().model;
  report.excluded = std::move(excluded);
  return report;
}

}  // namespace ragds::judge
