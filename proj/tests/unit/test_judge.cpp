#include "ragds/gateway/stub_gateway.hpp"
#include "ragds/judge/judge.hpp"
#include "ragds/judge/report.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>

using namespace ragds;
using namespace ragds::judge;
using gateway::ChatTurn;
using gateway::Role;

namespace {

gateway::EndpointProfile profile(std::string model) {
  gateway::EndpointProfile p;
  p.model = std::move(model);
  return p;
}

index::Corpus corpus_of(std::size_t n) {
  ingest::StructuredDocument d{"doc-j", "", {}};
  for (std::size_t i = 0; i < n; ++i) {
    d.sections.push_back({"Topic " + std::to_string(i), 1, {"Passage number " + std::to_string(i) + " text."}, {}});
  }
  gateway::StubGateway emb(profile("emb"));
  return index::build_corpus(d, {100, 0}, emb);
}

std::string after(std::string_view s, std::string_view marker) {
  const auto p = s.find(marker);
  return p == std::string_view::npos ? std::string() : std::string(s.substr(p + marker.size()));
}

// Question writer: one question per passage; optionally the same question
// for every passage whose number is below `collide_below`.
gateway::StubScript question_script(std::size_t collide_below = 0) {
  gateway::StubScript s;
  s.responder = [collide_below](std::span<const ChatTurn> msgs, const gateway::CompletionParams&)
      -> std::optional<std::string> {
    const auto& u = msgs.back().content;
    if (u.ends_with("\nStandalone question:")) {
      auto q = after(u, "Follow-up question: ");
      return q.substr(0, q.find('\n'));
    }
    const auto num = after(u, "Passage number ");
    const auto n = std::stoul(num.substr(0, num.find(' ')));
    if (n < collide_below) return std::string("What is the shared question?");
    return "What does passage " + std::to_string(n) + " say?";
  };
  return s;
}

// Judge whose score depends only on the graded answer text.
gateway::StubScript judge_script() {
  gateway::StubScript s;
  s.responder = [](std::span<const ChatTurn> msgs, const gateway::CompletionParams&) -> std::optional<std::string> {
    const auto answer = after(msgs.front().content, "Answer to grade:\n");
    const int score = 1 + static_cast<int>(std::hash<std::string>{}(answer.substr(0, answer.find("\n\n"))) % 10);
    return "Reasonable.\nSCORE: " + std::to_string(score);
  };
  return s;
}

gateway::StubScript answer_script(std::string tag) {
  gateway::StubScript s;
  s.responder = [tag](std::span<const ChatTurn> msgs, const gateway::CompletionParams&) -> std::optional<std::string> {
    return tag + " answers: " + msgs.back().content;
  };
  return s;
}

std::vector<JudgeRecord> uniform_records(std::size_t n, int a, int b) {
  std::vector<JudgeRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"q" + std::to_string(i), "Q", "A", "B", a, b, "j", "", ""});
  return out;
}

}  // namespace

TEST_CASE("parse_score: strict final line") {
  CHECK(parse_score("Good answer.\nSCORE: 7") == 7);
  CHECK(parse_score("SCORE: 10\n\n  \n") == 10);
  CHECK(parse_score("SCORE:1") == 1);
  CHECK_FALSE(parse_score("SCORE: 11"));
  CHECK_FALSE(parse_score("SCORE: 0"));
  CHECK_FALSE(parse_score("SCORE: 7.5"));
  CHECK_FALSE(parse_score("SCORE: 7\nThanks!"));
  CHECK_FALSE(parse_score("score: 7"));
  CHECK_FALSE(parse_score("I'd give it a 7"));
  CHECK_FALSE(parse_score(""));
}

TEST_CASE("score_answer: re-ask once, then give up") {
  const std::string q = "What is X?", a = "X is Y.";
  const std::vector<ChatTurn> first{{Role::User, judge_prompt(q, a, "")}};
  std::vector<ChatTurn> second = first;
  second.push_back({Role::Assistant, "Looks fine, eight out of ten."});
  second.push_back({Role::User, std::string(kReaskPrompt)});

  gateway::StubGateway good(profile("judge"));
  good.script(first, "Looks fine, eight out of ten.");
  good.script(second, "Accurate but brief.\nSCORE: 8");
  const auto j = score_answer(q, a, good);
  CHECK(j.score == 8);
  CHECK(j.rationale == "Accurate but brief.");
  CHECK(good.metrics().chat_calls == 2);

  gateway::StubGateway bad(profile("judge"));
  bad.script(first, "SCORE: 11");
  auto second_bad = first;
  second_bad.push_back({Role::Assistant, "SCORE: 11"});
  second_bad.push_back({Role::User, std::string(kReaskPrompt)});
  bad.script(second_bad, "SCORE: 11");
  CHECK_THROWS_AS(score_answer(q, a, bad), UnparsableJudgment);
  CHECK(bad.metrics().chat_calls == 2);

  CHECK_THROWS_AS(score_answer(q, "  ", good), std::invalid_argument);
  CHECK(judge_prompt(q, a, "ref text").find("Reference material:\nref text") != std::string::npos);
}

TEST_CASE("aggregate: worked example and empty input") {
  const auto r = aggregate_scores(uniform_records(80, 9, 7));
  CHECK(r.n_questions == 80);
  CHECK(r.total_a == 720);
  CHECK(r.total_b == 560);
  CHECK(r.mean_a == Catch::Approx(9.0));
  CHECK(r.mean_b == Catch::Approx(7.0));
  CHECK(r.wins == 80);
  CHECK(r.ties + r.losses == 0);

  const auto e = aggregate_scores({});
  CHECK(e.n_questions == 0);
  CHECK(e.total_a == 0);
  CHECK(e.mean_a == 0.0);

  auto bad = uniform_records(2, 5, 5);
  bad[1].score_b = 11;
  CHECK_THROWS_AS(aggregate_scores(bad), std::invalid_argument);
  bad[1].score_b = 0;
  CHECK_THROWS_AS(aggregate_scores(bad), std::invalid_argument);
}

TEST_CASE("property: aggregation equals direct summation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<JudgeRecord> recs;
    long sa = 0, sb = 0;
    std::size_t w = 0, t = 0, l = 0;
    for (std::size_t i = rng() % 120; i > 0; --i) {
      const int a = 1 + static_cast<int>(rng() % 10), b = 1 + static_cast<int>(rng() % 10);
      recs.push_back({"q", "", "", "", a, b, "", "", ""});
      sa += a;
      sb += b;
      (a > b ? w : a == b ? t : l)++;
    }
    const auto r = aggregate_scores(recs);
    CHECK(r.total_a == sa);
    CHECK(r.total_b == sb);
    CHECK(r.wins == w);
    CHECK(r.ties == t);
    CHECK(r.losses == l);
    if (!recs.empty()) CHECK(r.mean_a == Catch::Approx(static_cast<double>(sa) / recs.size()));

    // Swapping labels mirrors the outcome.
    auto swapped = recs;
    for (auto& x : swapped) std::swap(x.score_a, x.score_b);
    const auto s = aggregate_scores(swapped);
    CHECK(s.total_a == r.total_b);
    CHECK(s.wins == r.losses);
    CHECK(s.ties == r.ties);
  }
}

TEST_CASE("sampling: seeded permutation") {
  const auto p = seeded_permutation(50, 7);
  CHECK(p == seeded_permutation(50, 7));
  CHECK(p != seeded_permutation(50, 8));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  CHECK(seeded_permutation(0, 1).empty());
}

TEST_CASE("sampling: 80 distinct questions, deterministic") {
  const auto corpus = corpus_of(120);
  gateway::StubGateway gen(profile("gen"), question_script());
  const auto qs = sample_questions(corpus, 80, gen, 42);
  REQUIRE(qs.size() == 80);
  std::set<std::string> texts, chunks;
  for (const auto& q : qs) {
    texts.insert(q.question);
    chunks.insert(q.source_chunk_id);
  }
  CHECK(texts.size() == 80);
  CHECK(chunks.size() == 80);
  CHECK(qs.front().question_id == "q-0001");
  CHECK(qs.back().question_id == "q-0080");
  CHECK(sample_questions(corpus, 80, gen, 42) == qs);
  CHECK(sample_questions(corpus, 80, gen, 43) != qs);

  CHECK_THROWS_AS(sample_questions(corpus_of(10), 11, gen, 1), InsufficientChunks);
}

TEST_CASE("sampling: duplicates are redrawn within the budget") {
  const auto corpus = corpus_of(40);
  // 35 passages share one question, so only 6 distinct questions exist.
  gateway::StubGateway gen(profile("gen"), question_script(35));
  EvalSettings s;
  s.resample_budget = 34;  // 40 draws: the whole corpus
  const auto qs = sample_questions(corpus, 6, gen, 5, s);
  std::set<std::string> texts;
  for (const auto& q : qs) texts.insert(q.question);
  CHECK(texts.size() == 6);
  CHECK(texts.count("What is the shared question?") == 1);
  CHECK_THROWS_AS(sample_questions(corpus, 7, gen, 5, s), BudgetExhausted);
}

TEST_CASE("answers: failures are excluded, order is independent of scheduling") {
  std::vector<Question> qs;
  for (int i = 0; i < 30; ++i) qs.push_back({"q-" + std::to_string(i), "Question " + std::to_string(i), "c"});

  gateway::StubScript flaky = answer_script("A");
  flaky.responder = [](std::span<const ChatTurn> msgs, const gateway::CompletionParams&) -> std::optional<std::string> {
    const auto& q = msgs.back().content;
    if (q == "Question 3") throw gateway::GatewayError(gateway::ErrorKind::ExhaustedRetries, "down", 3);
    if (q == "Question 7") return std::string("   ");
    return "A answers: " + q;
  };
  gateway::StubGateway a(profile("a"), flaky), b(profile("b"), answer_script("B"));

  EvalSettings serial, parallel;
  parallel.workers = 8;
  const auto r1 = collect_answers(qs, a, b, serial);
  const auto r8 = collect_answers(qs, a, b, parallel);
  CHECK(r1.pairs == r8.pairs);
  CHECK(r1.excluded == r8.excluded);
  REQUIRE(r1.excluded.size() == 2);
  CHECK(r1.excluded[0].question_id == "q-3");
  CHECK(r1.excluded[0].reason.find("model A failed") != std::string::npos);
  CHECK(r1.excluded[1].reason.find("empty") != std::string::npos);
  CHECK(r1.pairs.size() == 28);
  CHECK(r1.pairs[0].answer_b == "B answers: Question 0");

  // Every question failing surfaces the error.
  gateway::StubScript down;
  down.responder = [](auto, auto) -> std::optional<std::string> {
    throw gateway::GatewayError(gateway::ErrorKind::ExhaustedRetries, "down", 3);
  };
  gateway::StubGateway dead(profile("dead"), down);
  CHECK_THROWS_AS(collect_answers(qs, dead, b), gateway::GatewayError);
  CHECK_THROWS_AS(collect_answers({}, a, b), std::invalid_argument);
}

TEST_CASE("run_evaluation: deterministic, symmetric under label swap") {
  const auto corpus = corpus_of(100);
  gateway::StubGateway gen(profile("gen"), question_script());
  gateway::StubGateway a(profile("model-a"), answer_script("Alpha"));
  gateway::StubGateway b(profile("model-b"), answer_script("Beta"));
  gateway::StubGateway j(profile("judge"), judge_script());
  EvalSettings s;
  s.workers = 4;

  const auto r = run_evaluation(corpus, 80, 42, {gen, a, b, j}, s);
  CHECK(r.n_questions == 80);
  CHECK(r.records.size() == 80);
  CHECK(r.model_a == "model-a");
  CHECK(r.judge_model == "judge");
  CHECK(r.wins + r.ties + r.losses == 80);
  CHECK(aggregate_scores(r.records).total_b == r.total_b);
  long sum_a = 0;
  for (const auto& rec : r.records) sum_a += rec.score_a;
  CHECK(sum_a == r.total_a);
  CHECK(run_evaluation(corpus, 80, 42, {gen, a, b, j}, s) == r);

  const auto swapped = run_evaluation(corpus, 80, 42, {gen, b, a, j}, s);
  CHECK(swapped.total_a == r.total_b);
  CHECK(swapped.total_b == r.total_a);
  CHECK(swapped.wins == r.losses);
  CHECK(swapped.losses == r.wins);
  CHECK(swapped.ties == r.ties);

  CHECK(report_from_json(report_to_json(r)) == r);
  const auto table = report_table(r);
  CHECK(table.find("q-0001") != std::string::npos);
  CHECK(table.find(std::to_string(r.total_a)) != std::string::npos);
  const auto j2 = nlohmann::json::parse(report_to_json(r));
  CHECK(j2["questions"].size() == 80);
}

TEST_CASE("run_evaluation: judge failures become exclusions") {
  const auto corpus = corpus_of(20);
  gateway::StubGateway gen(profile("gen"), question_script());
  gateway::StubGateway a(profile("a"), answer_script("Alpha"));
  gateway::StubGateway b(profile("b"), answer_script("Beta"));
  gateway::StubScript picky = judge_script();
  auto base = picky.responder;
  picky.responder = [base](std::span<const ChatTurn> msgs, const gateway::CompletionParams& p) -> std::optional<std::string> {
    if (msgs.front().content.find("passage 5 ") != std::string::npos) return std::string("no score");
    return base(msgs, p);
  };
  gateway::StubGateway j(profile("judge"), picky);
  const auto r = run_evaluation(corpus, 10, 1, {gen, a, b, j});
  const auto judged = r.records.size();
  CHECK(judged + r.excluded.size() == 10);
  CHECK(r.n_questions == judged);
  for (const auto& e : r.excluded) CHECK_FALSE(e.reason.empty());
}
