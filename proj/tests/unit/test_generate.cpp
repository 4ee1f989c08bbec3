#include "ragds/gateway/stub_gateway.hpp"
#include "ragds/generate/batch.hpp"
#include "ragds/generate/prompt_template.hpp"
#include "ragds/generate/qa_entry.hpp"
#include "ragds/generate/qa_extract.hpp"
#include "ragds/generate/retrieval_chain.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <random>

using namespace ragds;
using namespace ragds::generate;
using gateway::ChatTurn;
using gateway::Role;

namespace {

gateway::EndpointProfile profile(std::string model) {
  gateway::EndpointProfile p;
  p.model = std::move(model);
  return p;
}

// Small corpus with a handful of top-level sections.
index::Corpus small_corpus() {
  ingest::StructuredDocument d{"doc-g", "Manual", {}};
  d.sections.push_back({"Use of the Manual", 1, {"How to read the manual and its coding conventions."}, {}});
  d.sections.push_back({"Anxiety Disorders", 1, {"Anxiety disorders share excessive fear and related behavioral disturbances."},
                        {{"Panic Disorder", 2, {"Recurrent unexpected panic attacks occur."}, {}}}});
  d.sections.push_back({"Depressive Disorders", 1, {"Depressive disorders feature sad, empty or irritable mood."}, {}});
  d.sections.push_back({"Social Anxiety", 1, {"Fear of social situations."}, {}});
  gateway::StubGateway emb(profile("emb"));
  return index::build_corpus(d, {100, 0}, emb);
}

std::string pairs_json(std::size_t n, const std::string& tag) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    arr.push_back({{"instruction", "Q " + tag + " " + std::to_string(i) + "?"},
                   {"output", "A " + tag + " " + std::to_string(i) + "."}});
  }
  return arr.dump();
}

}  // namespace

TEST_CASE("template: category prompt renders and keeps literal braces") {
  const auto t = PromptTemplate::default_category_prompt();
  CHECK(t.required_tags() == std::set<std::string>{"Disorder category"});
  const auto out = render_category_prompt(t, "Anxiety Disorders");
  CHECK(out.starts_with("Extract professional knowledge about Anxiety Disorders from the medical document"));
  CHECK(out.find("{Disorder category}") == std::string::npos);
  CHECK(out.find("\"instruction\": {QUESTION}") != std::string::npos);
  CHECK(out.find("\"output\": {ANSWER}") != std::string::npos);
  CHECK_THROWS_AS(render_category_prompt(t, ""), std::invalid_argument);
}

TEST_CASE("template: edge cases") {
  PromptTemplate plain("no tags here { } {1} {not closed");
  CHECK(plain.required_tags().empty());
  CHECK(plain.render({}) == "no tags here { } {1} {not closed");
  CHECK(render_category_prompt(plain, "X") == plain.text());

  PromptTemplate two("{Disorder category} and {Other tag}");
  CHECK(two.required_tags().size() == 2);
  CHECK_THROWS_AS(render_category_prompt(two, "X"), UnboundTag);
  CHECK(two.render({{"Disorder category", "A"}, {"Other tag", "B"}}) == "A and B");

  PromptTemplate custom("About {topic}: go");
  CHECK(render_category_prompt(custom, "Sleep", "topic") == "About Sleep: go");
  // Substituted values are not rescanned.
  CHECK(custom.render({{"topic", "{topic}"}}) == "About {topic}: go");
}

TEST_CASE("condense_query: empty history makes no call") {
  gateway::StubGateway chat(profile("chat"));
  CHECK(condense_query({}, "What is it?", chat) == "What is it?");
  CHECK(chat.metrics().chat_calls == 0);
}

TEST_CASE("condense_query: one scripted call") {
  gateway::StubGateway chat(profile("chat"));
  const std::vector<ChatTurn> history{{Role::User, "Tell me about panic disorder."},
                                      {Role::Assistant, "It involves recurrent panic attacks."}};
  chat.script_user(condense_prompt(history, "How long must they last?"),
                   "  How long must panic attacks last\n to meet panic disorder criteria? ");
  CHECK(condense_query(history, "How long must they last?", chat) ==
        "How long must panic attacks last to meet panic disorder criteria?");
  CHECK(chat.metrics().chat_calls == 1);
  const auto p = condense_prompt(history, "Q?");
  CHECK(p.find("user: Tell me about panic disorder.") != std::string::npos);
  CHECK(p.ends_with("Follow-up question: Q?\nStandalone question:"));
}

TEST_CASE("retrieval: context follows rank order with headers") {
  const auto corpus = small_corpus();
  gateway::StubGateway emb(profile("emb"));
  const auto& target = corpus.chunks()[1];
  // Querying with a chunk's own text makes it the top hit under hash embeddings.
  const auto ctx = retrieve_context(corpus, target.text, 3, emb);
  REQUIRE(ctx.chunk_ids.size() == 3);
  CHECK(ctx.chunk_ids[0] == target.chunk_id);
  CHECK(ctx.context_text.starts_with(format_chunk(target, 1)));
  CHECK(std::count(ctx.context_text.begin(), ctx.context_text.end(), '[') >= 3);
  CHECK(format_chunk(target, 1) == "[1] Anxiety Disorders\n" + target.text);
  index::Chunk anon;
  anon.section_path = {1, 0};
  anon.text = "t";
  CHECK(format_chunk(anon, 2) == "[2] section 2.1\nt");

  CHECK_THROWS_AS(retrieve_context(index::Corpus{}, "q", 3, emb), index::EmptyIndex);
}

TEST_CASE("retrieval: category query matches top-level headings") {
  const auto corpus = small_corpus();
  CHECK(category_query("Anxiety Disorders", {}, corpus) ==
        "Anxiety Disorders Anxiety disorders share excessive fear and related behavioral disturbances.");
  CHECK(category_query("depressive disorders", {}, corpus).starts_with("Depressive Disorders "));
  // Exact match wins over containment.
  CHECK(category_query("Social Anxiety", {}, corpus).starts_with("Social Anxiety "));
  const std::vector<std::string> toc{"Use of the Manual"};
  CHECK(category_query("Misc.", toc, corpus).starts_with("Use of the Manual "));
  CHECK(category_query("Unknown Category", {}, corpus) == "Unknown Category");
}

TEST_CASE("extract: qualifying objects anywhere in the text") {
  using V = std::vector<QAPair>;
  CHECK(extract_qa_objects(R"([{"instruction":"a","output":"b"},{"instruction":"c","output":"d"}])") ==
        V{{"a", "b"}, {"c", "d"}});
  CHECK(extract_qa_objects("Sure! Here you go:\n```json\n[{\"instruction\": \"q1\", \"output\": \"a1\"}]\n```\nHope it helps.") ==
        V{{"q1", "a1"}});
  CHECK(extract_qa_objects(R"({"instruction":"x","output":"y"} and then {"instruction":"z","output":"w","extra":1})") ==
        V{{"x", "y"}, {"z", "w"}});
  CHECK(extract_qa_objects(R"({"data":{"pairs":[{"instruction":"n","output":"m"}]}})") == V{{"n", "m"}});
  CHECK(extract_qa_objects(R"([{"instruction":"","output":"y"},{"instruction":"ok","output":"fine"}])") ==
        V{{"ok", "fine"}});
  CHECK(extract_qa_objects(R"({"instruction":"brace } inside","output":"and \" quote {"})") ==
        V{{"brace } inside", "and \" quote {"}});
  // A truncated array still yields its complete members.
  CHECK(extract_qa_objects(R"([{"instruction":"a","output":"b"}, {"instruction":"c","outp)") == V{{"a", "b"}});
}

TEST_CASE("extract: nothing usable") {
  for (const char* bad : {"", "I cannot help with that.", "{\"instruction\": 1, \"output\": 2}",
                          "[{\"question\":\"q\",\"answer\":\"a\"}]", "{not json at all}",
                          "{\"instruction\":\"only one field\"}"}) {
    CHECK_THROWS_AS(extract_qa_objects(bad), MalformedGeneration);
  }
}

TEST_CASE("property: extraction recovers serialized pairs from noise") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> noise{"Here are the pairs.", "```json", "```", "Note: {x}", "[draft]", ""};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<QAPair> want;
    std::string text;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      QAPair p{"q" + std::to_string(rng() % 1000) + " {" + std::to_string(i) + "}?",
               "a \"" + std::to_string(rng()) + "\" ]"};
      want.push_back(p);
      text += noise[rng() % noise.size()] + "\n";
      text += nlohmann::json{{"instruction", p.instruction}, {"output", p.output}}.dump() + "\n";
    }
    CHECK(extract_qa_objects(text) == want);
  }
}

TEST_CASE("entry: status moves forward only") {
  QAEntry e;
  CHECK(e.status == Status::Raw);
  advance(e, Status::Deduped);
  advance(e, Status::Deduped);
  advance(e, Status::Accepted);
  CHECK_THROWS_AS(advance(e, Status::Filtered), std::logic_error);
  CHECK(e.status == Status::Accepted);
  for (auto s : {Status::Raw, Status::Deduped, Status::Filtered, Status::Accepted}) {
    CHECK(status_from_string(to_string(s)) == s);
  }
  CHECK_THROWS(status_from_string("pending"));
}

TEST_CASE("entry: JSONL round trip") {
  std::vector<QAEntry> es(3);
  for (std::size_t i = 0; i < es.size(); ++i) {
    es[i] = {"Q\n\"" + std::to_string(i) + "\" é?", "A", "Cat", {"c:1", "c:2"}, {"gen", 0.7, "abc"}, Status::Deduped};
  }
  const auto bytes = entries_to_jsonl(es);
  CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 3);
  CHECK(entries_from_jsonl(bytes) == es);
  CHECK(entries_from_jsonl("").empty());
  CHECK_THROWS(entries_from_jsonl("{broken\n"));
}

TEST_CASE("batch: 20 pairs per call reaches 60 in 3 calls") {
  const auto corpus = small_corpus();
  gateway::StubGateway emb(profile("emb"));
  std::atomic<int> n{0};
  gateway::StubScript script;
  std::set<std::int64_t> seeds;
  script.responder = [&](std::span<const ChatTurn> msgs, const gateway::CompletionParams& p)
      -> std::optional<std::string> {
    seeds.insert(*p.seed);
    CHECK(msgs.size() == 2);
    CHECK(msgs.back().content.find("about Anxiety Disorders") != std::string::npos);
    CHECK(msgs.back().content.ends_with("Return 20 different question-answer pairs as a JSON array of objects in that format."));
    return pairs_json(20, std::to_string(n++));
  };
  gateway::StubGateway gen(profile("gen-model"), script);
  GenerationSettings s;
  s.per_call = 20;
  s.seed = 9;
  const auto r = generate_category_batch("Anxiety Disorders", "Anxiety Disorders", {60, 100}, corpus, gen, emb,
                                         PromptTemplate::default_category_prompt(), s);
  CHECK(r.calls == 3);
  CHECK(r.entries.size() == 60);
  CHECK_FALSE(r.budget_exhausted);
  CHECK(seeds.size() == 3);
  CHECK(emb.metrics().embed_calls == 1);  // retrieval happens once
  for (const auto& e : r.entries) {
    CHECK(e.category == "Anxiety Disorders");
    CHECK(e.status == Status::Raw);
    CHECK(e.gen_meta.model == "gen-model");
    CHECK(e.gen_meta.temperature == 0.7);
    CHECK(e.source_chunk_ids.size() == 4);
    CHECK(e.gen_meta.prompt_hash.size() == 64);
  }
}

TEST_CASE("batch: an oversize reply is capped at max") {
  const auto corpus = small_corpus();
  gateway::StubGateway emb(profile("emb"));
  gateway::StubScript script;
  script.responder = [](auto, auto) -> std::optional<std::string> { return pairs_json(120, "x"); };
  gateway::StubGateway gen(profile("gen"), script);
  const auto r = generate_category_batch("Cat", "q", {60, 100}, corpus, gen, emb,
                                         PromptTemplate::default_category_prompt(), {});
  CHECK(r.calls == 1);
  REQUIRE(r.entries.size() == 100);
  CHECK(r.entries.front().instruction == "Q x 0?");
  CHECK(r.entries.back().instruction == "Q x 99?");
}

TEST_CASE("batch: garbage exhausts the retry budget") {
  const auto corpus = small_corpus();
  gateway::StubGateway emb(profile("emb"));
  gateway::StubScript script;
  script.responder = [](auto, auto) -> std::optional<std::string> { return "I'd rather not."; };
  gateway::StubGateway gen(profile("gen"), script);
  GenerationSettings s;
  s.retry_budget = 5;
  const auto r = generate_category_batch("Cat", "q", {60, 100}, corpus, gen, emb,
                                         PromptTemplate::default_category_prompt(), s);
  CHECK(r.budget_exhausted);
  CHECK(r.calls == 5);
  CHECK(r.failed_calls == 5);
  CHECK(r.entries.empty());
  CHECK(gen.metrics().chat_calls == 5);

  s.retry_budget = 0;
  CHECK_THROWS_AS(generate_category_batch("Cat", "q", {60, 100}, corpus, gen, emb,
                                          PromptTemplate::default_category_prompt(), s),
                  std::invalid_argument);
}

TEST_CASE("batch: gateway errors propagate") {
  const auto corpus = small_corpus();
  gateway::StubGateway emb(profile("emb"));
  gateway::StubScript script;
  script.responder = [](auto, auto) -> std::optional<std::string> {
    throw gateway::GatewayError(gateway::ErrorKind::ExhaustedRetries, "down", 3);
  };
  gateway::StubGateway gen(profile("gen"), script);
  CHECK_THROWS_AS(generate_category_batch("Cat", "q", {1, 2}, corpus, gen, emb,
                                          PromptTemplate::default_category_prompt(), {}),
                  gateway::GatewayError);
}

TEST_CASE("batch: call seeds are reproducible and distinct") {
  CHECK(call_seed(1, "A", 0) == call_seed(1, "A", 0));
  CHECK(call_seed(1, "A", 0) != call_seed(1, "A", 1));
  CHECK(call_seed(1, "A", 0) != call_seed(2, "A", 0));
  CHECK(call_seed(1, "A", 0) != call_seed(1, "B", 0));
  CHECK(call_seed(1, "A", 0) >= 0);
}
