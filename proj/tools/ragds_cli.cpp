// ragds: build an instruction dataset from a TEI document and evaluate it.
//
//   ragds run --config pipeline.json [--offline] [--force]
//   ragds <ingest|index|generate|curate|eval> --config pipeline.json
//   ragds validate --config pipeline.json
//
// Stage subcommands also take explicit paths, which replace the workspace
// defaults (ingest needs no config at all):
//
//   ragds ingest --tei doc.tei.xml --out doc.json
//   ragds index --doc doc.json --out index.bin [--max-tokens N --overlap N]
//   ragds generate --index index.bin --categories tax.json --out raw.jsonl
//   ragds curate --in raw.jsonl --taxonomy tax.json --out dataset.jsonl
//   ragds eval --index index.bin --n 80 --seed 1 --model-a A --model-b B --judge J --out report.json
//
// Exit status: 0 ok, 2 config error, 3 stage failure, 4 endpoint exhausted.

#include "ragds/pipeline/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace ragds::pipeline;
namespace stdfs = std::filesystem;

namespace {

struct Overrides {
  std::string tei, doc, index, taxonomy, raw, dataset, report;
  std::optional<std::size_t> max_tokens, overlap, n;
  std::string model_a, model_b, judge;
};

// A role name from the config's endpoints, or a model id served by the
// endpoint already configured for that role.
void apply_profile(const std::string& value, ragds::gateway::EndpointProfile& slot, const Endpoints& eps) {
  if (value.empty()) return;
  const std::pair<const char*, const ragds::gateway::EndpointProfile*> roles[] = {
      {"generator", &eps.generator},     {"embedder", &eps.embedder},       {"judge", &eps.judge},
      {"candidate_a", &eps.candidate_a}, {"candidate_b", &eps.candidate_b}};
  for (const auto& [name, profile] : roles) {
    if (value == name) {
      slot = *profile;
      return;
    }
  }
  slot.model = value;
}

stdfs::path abs_or_empty(const std::string& p) { return p.empty() ? stdfs::path() : stdfs::absolute(p); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document-grounded instruction dataset pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  bool offline = false;
  bool force = false;
  bool quiet = false;
  std::optional<std::int64_t> seed;
  Overrides ov;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    sub->add_flag("--offline", offline, "Use the in-process stub for every endpoint");
    sub->add_flag("--force", force, "Re-run stages even if up to date");
    sub->add_flag("-q,--quiet", quiet, "Only print errors");
    sub->add_option("--seed", seed, "Override the config seed");
  };

  std::vector<std::pair<CLI::App*, std::vector<Stage>>> subs;
  auto* run = app.add_subcommand("run", "Run every stage");
  subs.push_back({run, {kAllStages.begin(), kAllStages.end()}});

  auto* ingest = app.add_subcommand("ingest", "TEI -> structured document");
  ingest->add_option("--tei", ov.tei, "TEI input")->check(CLI::ExistingFile);
  ingest->add_option("--out", ov.doc, "Structured JSON output");
  subs.push_back({ingest, {Stage::Ingest}});

  auto* index = app.add_subcommand("index", "Chunk and embed into the flat index");
  index->add_option("--doc", ov.doc, "Structured JSON input")->check(CLI::ExistingFile);
  index->add_option("--out", ov.index, "Index output");
  index->add_option("--max-tokens", ov.max_tokens, "Chunk size in whitespace tokens");
  index->add_option("--overlap", ov.overlap, "Tokens carried between chunks");
  subs.push_back({index, {Stage::Index}});

  auto* generate = app.add_subcommand("generate", "Generate raw QA entries per category");
  generate->add_option("--index", ov.index, "Index input")->check(CLI::ExistingFile);
  generate->add_option("--categories", ov.taxonomy, "Category taxonomy (JSON)")->check(CLI::ExistingFile);
  generate->add_option("--out", ov.raw, "Raw entries output (JSONL)");
  subs.push_back({generate, {Stage::Generate}});

  auto* curate = app.add_subcommand("curate", "Dedup, filter, balance and export");
  curate->add_option("--in", ov.raw, "Raw entries (JSONL)")->check(CLI::ExistingFile);
  curate->add_option("--taxonomy", ov.taxonomy, "Category taxonomy (JSON)")->check(CLI::ExistingFile);
  curate->add_option("--out", ov.dataset, "Dataset output (JSONL)");
  subs.push_back({curate, {Stage::Curate}});

  auto* eval = app.add_subcommand("eval", "Judge two candidate models");
  eval->add_option("--index", ov.index, "Index input")->check(CLI::ExistingFile);
  eval->add_option("--n", ov.n, "Number of questions");
  eval->add_option("--model-a", ov.model_a, "Endpoint role or model id for candidate A");
  eval->add_option("--model-b", ov.model_b, "Endpoint role or model id for candidate B");
  eval->add_option("--judge", ov.judge, "Endpoint role or model id for the judge");
  eval->add_option("--out", ov.report, "Report output (JSON; a .txt table is written beside it)");
  subs.push_back({eval, {Stage::Eval}});

  for (auto& [sub, _] : subs) add_common(sub);
  auto* validate = app.add_subcommand("validate", "Check a config and print the resolved snapshot");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  PipelineConfig cfg;
  if (config_path.empty()) {
    // Only a fully specified ingest can run without a config.
    if (!ingest->parsed() || ov.tei.empty() || ov.doc.empty()) {
      std::cerr << "--config is required (ingest alone may use --tei and --out instead)\n";
      return kExitConfig;
    }
    cfg.workspace = stdfs::absolute(ov.doc).parent_path();
  } else {
    try {
      cfg = load_config(config_path, {offline});
    } catch (const ConfigInvalid& e) {
      std::cerr << e.what() << "\n";
      return kExitConfig;
    }
  }
  if (seed) cfg.seed = *seed;
  if (!ov.tei.empty()) cfg.tei = stdfs::absolute(ov.tei);
  if (!ov.taxonomy.empty()) cfg.taxonomy = stdfs::absolute(ov.taxonomy);
  if (ov.max_tokens) cfg.chunking.max_tokens = *ov.max_tokens;
  if (ov.overlap) cfg.chunking.overlap_tokens = *ov.overlap;
  if (ov.n) cfg.eval.n_questions = *ov.n;
  apply_profile(ov.model_a, cfg.endpoints.candidate_a, cfg.endpoints);
  apply_profile(ov.model_b, cfg.endpoints.candidate_b, cfg.endpoints);
  apply_profile(ov.judge, cfg.endpoints.judge, cfg.endpoints);
  if (cfg.chunking.overlap_tokens >= cfg.chunking.max_tokens || cfg.eval.n_questions == 0) {
    std::cerr << "--overlap must be less than --max-tokens and --n must be positive\n";
    return kExitConfig;
  }

  if (validate->parsed()) {
    std::cout << config_snapshot(cfg).dump(2) << "\n";
    return kExitOk;
  }

  RunOptions opts;
  opts.force = force;
  if (!quiet) opts.progress = [](std::string_view line) { std::cerr << line << "\n"; };
  opts.artifacts = {abs_or_empty(ov.doc), abs_or_empty(ov.index), abs_or_empty(ov.raw),
                    abs_or_empty(ov.dataset), abs_or_empty(ov.report)};

  for (auto& [sub, stages] : subs) {
    if (!sub->parsed()) continue;
    try {
      run_pipeline(cfg, stages, opts);
    } catch (const StageFailed& e) {
      std::cerr << "stage failed: " << e.what() << "\n";
      return e.exit_code();
    }
  }
  return kExitOk;
}
