#include "ragds/common/fs.hpp"
#include "ragds/common/text.hpp"
#include "ragds/curate/balance.hpp"
#include "ragds/curate/curator.hpp"
#include "ragds/curate/dedup.hpp"
#include "ragds/curate/export.hpp"
#include "ragds/curate/quality.hpp"
#include "ragds/curate/taxonomy.hpp"
#include "ragds/curate/train_config.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <random>
#include <sstream>

using namespace ragds;
using namespace ragds::curate;
using generate::QAEntry;
using generate::Status;

namespace {

QAEntry entry(std::string instruction, std::string category = "A",
              std::string output = "A sufficiently long answer text.") {
  QAEntry e;
  e.instruction = std::move(instruction);
  e.output = std::move(output);
  e.category = std::move(category);
  e.gen_meta = {"gen", 0.7, "h"};
  return e;
}

std::vector<std::string> instructions(std::span<const QAEntry> es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(e.instruction);
  return out;
}

std::vector<std::string> pick(const std::vector<QAEntry>& es, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(es[i].instruction);
  return out;
}

// 500 entries over a small vocabulary with planted exact and near duplicates.
std::vector<QAEntry> planted_entries(std::uint64_t seed) {
  static const std::vector<std::string> vocab{
      "what", "is",      "the",     "diagnostic", "criteria", "for",   "panic", "disorder",
      "how",  "long",    "must",    "symptoms",   "persist",  "which", "onset", "age",
      "of",   "anxiety", "x-ray",   "it's",       "course",   "risk",  "mood",  "sleep"};
  std::mt19937_64 rng(seed);
  std::vector<QAEntry> out;
  auto sentence = [&] {
    std::string s;
    for (std::size_t n = 2 + rng() % 12; n > 0; --n) s += (s.empty() ? "" : " ") + vocab[rng() % vocab.size()];
    return s;
  };
  while (out.size() < 500) {
    const auto roll = rng() % 10;
    if (out.empty() || roll < 5) {
      out.push_back(entry(sentence() + "?"));
      continue;
    }
    auto base = out[rng() % out.size()].instruction;
    if (roll < 7) {
      // Exact duplicate modulo case, spacing and trailing punctuation.
      std::string v;
      for (auto c : base) v += (rng() % 2) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      v = "  " + v;
      std::size_t sp = v.find(' ', 3);
      if (sp != std::string::npos) v.insert(sp, "\t ");
      v += (rng() % 2) ? "!?" : " .";
      out.push_back(entry(v));
    } else {
      // Near duplicate: one word substituted or appended, punctuation wrapped.
      auto words = text::split_whitespace(base);
      if (rng() % 2) {
        words[rng() % words.size()] = vocab[rng() % vocab.size()];
      } else {
        words.push_back("\"" + vocab[rng() % vocab.size()] + "\",");
      }
      words[0] = "(" + words[0] + ")";
      out.push_back(entry(text::join(words, " ")));
    }
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

Taxonomy tax2(std::size_t total, double pa = 50, double pb = 50) {
  nlohmann::json j{{"name", "t"},
                   {"total_target", total},
                   {"categories", {{{"name", "A"}, {"percent", pa}}, {{"name", "B"}, {"percent", pb}}}}};
  return parse_taxonomy(j.dump());
}

}  // namespace

TEST_CASE("oracle self-check: normalization agrees with the library helper") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "aB .?!,;:\t\n-'x";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (std::size_t n = rng() % 20; n > 0; --n) s += alphabet[rng() % alphabet.size()];
    CHECK(testing::normalize_oracle(s) == text::normalize_instruction(s));
  }
}

TEST_CASE("exact dedup: worked example") {
  std::vector<QAEntry> es{entry("What is panic disorder?"), entry("what  is PANIC disorder"),
                          entry("What is panic disorder?!"), entry("What is panic-disorder?")};
  const auto out = exact_dedup(es);
  CHECK(instructions(out) == std::vector<std::string>{"What is panic disorder?", "What is panic-disorder?"});
  for (const auto& e : out) CHECK(e.status == Status::Deduped);
}

TEST_CASE("near dedup: shingles and threshold") {
  CHECK(instruction_shingles("What IS, (the) criteria?") ==
        std::vector<std::string>{"is the criteria", "what is the"});
  CHECK(instruction_shingles("Hello world!") == std::vector<std::string>{"hello world"});
  CHECK(instruction_shingles("?? !!").empty());
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == Catch::Approx(1.0 / 3));
  CHECK_THROWS_AS(near_dedup({}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(near_dedup({}, 1.5), std::invalid_argument);

  std::vector<QAEntry> es{entry("a b c d e f g h i j"), entry("a b c d e f g h i k"), entry("z y x w")};
  CHECK(near_dedup(es, 0.8).size() == 3);  // 7/9 shared shingles is below 0.8
  CHECK(near_dedup(es, 0.7).size() == 2);
}

TEST_CASE("property: dedup stages equal their pairwise oracles") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto es = planted_entries(seed);
    const auto exact = exact_dedup(es);
    CHECK(instructions(exact) == pick(es, testing::exact_dedup_oracle(es)));
    CHECK(exact.size() < es.size());
    CHECK(exact_dedup(exact) == exact);  // idempotent

    std::vector<QAEntry> exact_vec(exact.begin(), exact.end());
    for (double t : {0.3, 0.5, 0.8, 1.0}) {
      const auto near = near_dedup(exact, t);
      CHECK(instructions(near) == pick(exact_vec, testing::near_dedup_oracle(exact_vec, t)));
      CHECK(near_dedup(near, t) == near);
      // No surviving pair is similar at or above the threshold.
      for (std::size_t i = 0; i < near.size(); ++i) {
        for (std::size_t j = i + 1; j < near.size(); ++j) {
          const auto a = testing::shingle_set(near[i].instruction);
          const auto b = testing::shingle_set(near[j].instruction);
          CHECK(testing::jaccard_oracle(a, b) < t);
        }
      }
    }
  }
}

TEST_CASE("quality filter: planted faults charged to the first broken rule") {
  std::vector<QAEntry> es{
      entry("Short?"),                                                  // short instruction
      entry("Short?", "A", "tiny"),                                     // both; charged to instruction
      entry("A proper question here?", "A", "Too short."),              // short output
      entry("A proper question here?", "A", "I'm sorry, but I can't provide that."),
      entry("Another proper question?", "A", "As an AI model I won't say more than this."),
      entry("Ünïcödé question ok?", "A", "Ünïcödé answer of twenty"),   // counted in code points
      entry("Keep this proper one?"),
  };
  const auto r = quality_filter(es, {});
  CHECK(r.stats.short_instruction == 2);
  CHECK(r.stats.short_output == 1);
  CHECK(r.stats.refusal == 2);
  CHECK(r.stats.total() == 5);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].instruction == "Ünïcödé question ok?");
  for (const auto& e : r.entries) CHECK(e.status == Status::Filtered);

  QualityRules strict;
  strict.refusal_phrases = {"PROPER"};
  CHECK(quality_filter(es, strict).stats.refusal == 0);  // phrases apply to outputs only
}

TEST_CASE("taxonomy: parsing and targets") {
  const auto t = parse_taxonomy(fs::read_file(testing::data_file("taxonomy/dsm5.json")));
  CHECK(t.categories.size() == 23);
  CHECK(t.total_target == 2000);
  std::size_t sum = 0;
  for (const auto& c : t.categories) sum += c.target_count;
  CHECK(sum == 2000);
  REQUIRE(t.find("Anxiety"));
  REQUIRE(t.find("Medication-induced Movement"));
  REQUIRE(t.find("Misc."));
  CHECK(t.categories[*t.find("Anxiety")].target_count == 80);
  CHECK(t.categories[*t.find("Medication-induced Movement")].target_count == 40);
  CHECK(t.categories[*t.find("Misc.")].target_count == 320);
  CHECK(t.categories[*t.find("Misc.")].toc_headings == std::vector<std::string>{"Use of the Manual"});
  CHECK_FALSE(t.contains("Nope"));

  const auto half = rescale(t, 1000);
  CHECK(half.categories[*half.find("Misc.")].target_count == 160);

  CHECK_THROWS_AS(parse_taxonomy("[]"), TaxonomyInvalid);
  CHECK_THROWS_AS(tax2(10, 50, 40), TaxonomyInvalid);
  CHECK_THROWS_AS(parse_taxonomy(R"({"name":"x","total_target":1,"categories":[{"name":"A","percent":50},{"name":"A","percent":50}]})"),
                  TaxonomyInvalid);
  CHECK_THROWS_AS(parse_taxonomy(R"({"name":"x","total_target":1,"categories":[]})"), TaxonomyInvalid);
}

TEST_CASE("balance: caps, grouping and shortfall") {
  const auto t = tax2(6);
  std::vector<QAEntry> es;
  for (int i = 0; i < 5; ++i) {
    es.push_back(entry("b" + std::to_string(i), "B"));
    if (i < 2) es.push_back(entry("a" + std::to_string(i), "A"));
  }
  const auto r = balance_categories(es, t);
  CHECK(instructions(r.entries) == std::vector<std::string>{"a0", "a1", "b0", "b1", "b2"});
  REQUIRE(r.outcomes.size() == 2);
  CHECK(r.outcomes[0].available == 2);
  CHECK(r.outcomes[0].accepted == 2);
  CHECK(r.outcomes[0].shortfall == 1);
  CHECK(r.outcomes[1].accepted == 3);
  CHECK(r.outcomes[1].shortfall == 0);
  for (const auto& e : r.entries) CHECK(e.status == Status::Accepted);

  es.push_back(entry("c", "C"));
  CHECK_THROWS_AS(balance_categories(es, t), UnknownCategory);
}

TEST_CASE("curate: stage counts are monotone and consistent") {
  const auto t = tax2(200);
  auto es = planted_entries(9);
  for (std::size_t i = 0; i < es.size(); ++i) es[i].category = (i % 3) ? "A" : "B";
  es[0].output = "I cannot answer this question, sorry.";
  const auto r = curate::curate(es, t, {});
  const auto& m = r.manifest;
  CHECK(m.totals.raw == 500);
  CHECK(m.totals.raw >= m.totals.after_exact_dedup);
  CHECK(m.totals.after_exact_dedup >= m.totals.after_near_dedup);
  CHECK(m.totals.after_near_dedup >= m.totals.after_filter);
  CHECK(m.totals.after_filter >= m.totals.accepted);
  CHECK(m.totals.after_near_dedup - m.totals.after_filter == m.filter_drops.total());
  CHECK(m.totals.accepted == r.accepted.size());
  for (const auto& c : m.categories) {
    CHECK(c.accepted <= c.target);
    CHECK(c.accepted + c.shortfall == std::max(c.target, c.accepted));
  }
  double pct = 0;
  for (const auto& c : m.categories) pct += c.achieved_percent;
  CHECK(pct == Catch::Approx(100.0));

  auto not_raw = es;
  not_raw[0].status = Status::Deduped;
  CHECK_THROWS_AS(curate::curate(not_raw, t, {}), std::invalid_argument);
}

TEST_CASE("export: figure2 and alpaca lines, provenance, manifest") {
  testing::TempDir dir;
  auto a = entry("Q one?", "A", "Answer one has five words");
  a.source_chunk_ids = {"c:1"};
  auto b = entry("Q two?", "B", "Second answer");
  a.status = b.status = Status::Accepted;
  const std::vector<QAEntry> es{a, b};

  CHECK(dataset_line(a, FormatMode::Figure2) == R"({"instruction":"Q one?","output":"Answer one has five words"})");
  CHECK(dataset_line(a, FormatMode::Alpaca) == R"({"instruction":"Q one?","input":"","output":"Answer one has five words"})");
  CHECK(format_from_string("alpaca") == FormatMode::Alpaca);
  CHECK_THROWS(format_from_string("sharegpt"));

  DatasetManifest seed;
  seed.taxonomy = "t";
  seed.categories = {{"A", 1}, {"B", 1}};
  seed.config["k"] = 4;
  const auto out = dir / "ds.jsonl";
  const auto m = export_dataset(es, out, FormatMode::Figure2, seed);
  const auto paths = export_paths(out);
  CHECK(paths.manifest == dir / "ds.manifest.json");
  CHECK(paths.provenance == dir / "ds.provenance.jsonl");

  const auto lines = lines_of(fs::read_file(out));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == dataset_line(b, FormatMode::Figure2));
  CHECK(m.word_count == 2 + 5 + 2 + 2);
  CHECK(m.format == "figure2");
  CHECK(m.totals.accepted == 2);
  CHECK(m.categories[0].achieved_percent == Catch::Approx(50.0));
  CHECK(m.config["k"] == 4);
  CHECK(manifest_from_json(fs::read_file(paths.manifest)) == m);
  CHECK(manifest_from_json(manifest_to_json(m)) == m);

  const auto prov = lines_of(fs::read_file(paths.provenance));
  REQUIRE(prov.size() == 2);
  const auto p0 = nlohmann::json::parse(prov[0]);
  CHECK(p0["line"] == 1);
  CHECK(p0["category"] == "A");
  CHECK(p0["source_chunk_ids"] == nlohmann::json::array({"c:1"}));

  auto raw = es;
  raw[1].status = Status::Filtered;
  CHECK_THROWS_AS(export_dataset(raw, dir / "bad.jsonl", FormatMode::Figure2), std::invalid_argument);
}

TEST_CASE("train config: defaults, overrides, byte-stable output") {
  testing::TempDir dir;
  const TrainConfig def;
  CHECK(def.learning_rate == 5e-5);
  CHECK(def.lora_r == 16);
  CHECK(def.batch_size == 2);
  CHECK(def.epochs == 10);
  CHECK(def.gradient_accumulation == 8);
  CHECK(def.lr_scheduler == "cosine");

  emit_train_config(dir / "a.json");
  const auto j = nlohmann::ordered_json::parse(fs::read_file(dir / "a.json"));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"learning_rate", "lora_r", "batch_size", "epochs",
                                         "gradient_accumulation", "lr_scheduler"});
  CHECK(train_config_from_json(fs::read_file(dir / "a.json")) == def);

  TrainConfig three = def;
  three.epochs = 3;
  emit_train_config(dir / "b.json", three);
  emit_train_config(dir / "c.json", three);
  CHECK(fs::read_file(dir / "b.json") == fs::read_file(dir / "c.json"));
  CHECK(train_config_from_json(fs::read_file(dir / "b.json")).epochs == 3);

  TrainConfig bad = def;
  bad.lr_scheduler = "step";
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = def;
  bad.batch_size = 0;
  CHECK_THROWS_AS(emit_train_config(dir / "d.json", bad), std::invalid_argument);
}
