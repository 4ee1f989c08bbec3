#include "ragds/pipeline/pipeline.hpp"

#include "ragds/common/fs.hpp"
#include "ragds/common/hash.hpp"
#include "ragds/common/parallel.hpp"
#include "ragds/curate/curator.hpp"
#include "ragds/curate/export.hpp"
#include "ragds/curate/taxonomy.hpp"
#include "ragds/gateway/http_gateway.hpp"
#include "ragds/gateway/stub_gateway.hpp"
#include "ragds/generate/batch.hpp"
#include "ragds/generate/retrieval_chain.hpp"
#include "ragds/index/corpus.hpp"
#include "ragds/ingest/structured_json.hpp"
#include "ragds/ingest/tei_parser.hpp"
#include "ragds/judge/report.hpp"
#include "ragds/pipeline/offline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace ragds::pipeline {

namespace fs = std::filesystem;
using ragds::fs::read_file;
using ragds::fs::write_file_atomic;
using ojson = nlohmann::ordered_json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Index: return "index";
    case Stage::Generate: return "generate";
    case Stage::Curate: return "curate";
    case Stage::Eval: return "eval";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (auto st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  throw std::invalid_argument("unknown stage: " + std::string(s));
}

StageFailed::StageFailed(Stage stage, const std::string& what, int exit_code)
    : Error(std::string(to_string(stage)) + ": " + what), stage_(stage), exit_code_(exit_code) {}

fs::path Workspace::manifest() const { return curate::export_paths(dataset()).manifest; }

fs::path Workspace::provenance() const { return curate::export_paths(dataset()).provenance; }

fs::path Workspace::record(Stage s) const {
  return root / "stages" / (std::string(to_string(s)) + ".json");
}

std::unique_ptr<gateway::Gateway> make_gateway(const gateway::EndpointProfile& profile,
                                               const PipelineConfig& config,
                                               const gateway::LogSink& log) {
  if (config.offline.enabled) {
    OfflineOptions opt;
    opt.malformed_rate = config.offline.malformed_rate;
    opt.seed = static_cast<std::uint64_t>(config.seed);
    return std::make_unique<gateway::StubGateway>(profile, offline_script(profile.model, opt), log);
  }
  gateway::HttpGateway::Options opt;
  opt.log = log;
  return std::make_unique<gateway::HttpGateway>(profile, std::move(opt));
}

namespace {

struct StageIo {
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  ojson config;
};

std::string file_digest(const fs::path& p) { return sha256_hex(read_file(p)); }

std::string inputs_hash(const std::vector<fs::path>& inputs) {
  std::string acc;
  for (const auto& p : inputs) acc += p.filename().string() + '\0' + file_digest(p) + '\n';
  return sha256_hex(acc);
}

bool up_to_date(const Workspace& ws, Stage stage, const std::string& in_hash,
                const std::string& cfg_hash, const std::vector<fs::path>& outputs) {
  const auto path = ws.record(stage);
  if (!fs::exists(path)) return false;
  try {
    const auto rec = nlohmann::json::parse(read_file(path));
    if (rec.at("inputs_hash") != in_hash || rec.at("config_hash") != cfg_hash) return false;
    const auto& outs = rec.at("outputs");
    for (const auto& p : outputs) {
      const auto name = p.filename().string();
      if (!fs::exists(p) || !outs.contains(name) || outs.at(name) != file_digest(p)) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void write_record(const Workspace& ws, Stage stage, const std::string& in_hash,
                  const std::string& cfg_hash, const std::vector<fs::path>& outputs, double seconds,
                  const std::string& summary) {
  ojson rec;
  rec["stage"] = std::string(to_string(stage));
  rec["inputs_hash"] = in_hash;
  rec["config_hash"] = cfg_hash;
  rec["duration_ms"] = std::llround(seconds * 1000.0);
  ojson outs = ojson::object();
  for (const auto& p : outputs) outs[p.filename().string()] = file_digest(p);
  rec["outputs"] = std::move(outs);
  rec["summary"] = summary;
  write_file_atomic(ws.record(stage), rec.dump(2) + "\n");
}

// The stage that produces each workspace artifact, for prerequisite errors.
std::string_view producer(const Workspace& ws, const fs::path& p) {
  if (p == ws.document()) return "ingest";
  if (p == ws.index() || p == index::Corpus::chunks_path(ws.index())) return "index";
  if (p == ws.raw()) return "generate";
  return {};
}

StageIo stage_io(const PipelineConfig& c, const Workspace& ws, Stage stage) {
  const auto snap = config_snapshot(c);
  StageIo io;
  const auto chunks = index::Corpus::chunks_path(ws.index());
  switch (stage) {
    case Stage::Ingest:
      io.inputs = {c.tei};
      io.outputs = {ws.document()};
      io.config = {{"stage", "ingest"}};
      break;
    case Stage::Index:
      io.inputs = {ws.document()};
      io.outputs = {ws.index(), chunks};
      io.config = {{"chunking", snap["chunking"]},
                   {"embedder", snap["endpoints"]["embedder"]},
                   {"offline", snap["offline"]}};
      break;
    case Stage::Generate:
      io.inputs = {ws.index(), chunks, c.taxonomy};
      if (!c.generation.template_path.empty()) io.inputs.push_back(c.generation.template_path);
      io.outputs = {ws.raw()};
      io.config = {{"generation", snap["generation"]},
                   {"retrieval", snap["retrieval"]},
                   {"generator", snap["endpoints"]["generator"]},
                   {"embedder", snap["endpoints"]["embedder"]},
                   {"offline", snap["offline"]},
                   {"seed", snap["seed"]}};
      break;
    case Stage::Curate:
      io.inputs = {ws.raw(), c.taxonomy};
      io.outputs = {ws.dataset(), ws.manifest(), ws.provenance(), ws.train_config()};
      io.config = snap;
      break;
    case Stage::Eval:
      io.inputs = {ws.index(), chunks};
      io.outputs = {ws.report_json(), ws.report_txt()};
      io.config = {{"eval", snap["eval"]}, {"endpoints", snap["endpoints"]},
                   {"offline", snap["offline"]}, {"seed", snap["seed"]}};
      break;
  }
  return io;
}

class Runner {
 public:
  Runner(const PipelineConfig& c, const RunOptions& o) : c_(c), o_(o), ws_{c.workspace, o.artifacts} {}

  StageReport run(Stage stage) {
    const auto io = stage_io(c_, ws_, stage);
    for (const auto& p : io.inputs) {
      if (fs::is_regular_file(p)) continue;
      const auto by = producer(ws_, p);
      throw StageFailed(stage, "missing prerequisite " + p.filename().string() +
                                   (by.empty() ? std::string() : "; run the " + std::string(by) + " stage first"));
    }
    const auto in_hash = inputs_hash(io.inputs);
    const auto cfg_hash = sha256_hex(io.config.dump());

    StageReport report;
    report.stage = stage;
    if (!o_.force && up_to_date(ws_, stage, in_hash, cfg_hash, io.outputs)) {
      report.skipped = true;
      report.summary = "up to date";
      return report;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (stage) {
        case Stage::Ingest: report.summary = ingest(); break;
        case Stage::Index: report.summary = build_index(); break;
        case Stage::Generate: report.summary = generate(); break;
        case Stage::Curate: report.summary = curate_stage(); break;
        case Stage::Eval: report.summary = evaluate(); break;
      }
    } catch (const StageFailed&) {
      throw;
    } catch (const gateway::GatewayError& e) {
      throw StageFailed(stage, e.what(),
                        e.kind() == gateway::ErrorKind::ExhaustedRetries ? kExitEndpoint : kExitStage);
    } catch (const std::exception& e) {
      throw StageFailed(stage, e.what());
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record(ws_, stage, in_hash, cfg_hash, io.outputs, report.seconds, report.summary);
    return report;
  }

 private:
  void note(const std::string& line) const {
    if (o_.progress) o_.progress(line);
  }

  std::unique_ptr<gateway::Gateway> gw(const gateway::EndpointProfile& p) const {
    return make_gateway(p, c_, o_.gateway_log);
  }

  std::string ingest() {
    const auto doc = ingest::parse_tei(read_file(c_.tei));
    if (doc.sections.empty()) note("warning: " + c_.tei.string() + " has no headed sections");
    write_file_atomic(ws_.document(), ingest::serialize_structured(doc));
    std::size_t sections = 0, paragraphs = 0;
    ingest::for_each_section(doc, [&](const ingest::Section& s, const auto&) {
      ++sections;
      paragraphs += s.paragraphs.size();
    });
    return std::to_string(sections) + " sections, " + std::to_string(paragraphs) + " paragraphs";
  }

  std::string build_index() {
    const auto doc = ingest::load_structured(read_file(ws_.document()));
    auto embedder = gw(c_.endpoints.embedder);
    const auto corpus = index::build_corpus(doc, c_.chunking, *embedder);
    corpus.save(ws_.index());
    return std::to_string(corpus.size()) + " chunks";
  }

  std::string generate() {
    const auto corpus = index::Corpus::load(ws_.index());
    const auto taxonomy = curate::parse_taxonomy(read_file(c_.taxonomy));
    const auto tmpl = c_.generation.template_path.empty()
                          ? generate::PromptTemplate::default_category_prompt()
                          : generate::PromptTemplate(read_file(c_.generation.template_path));
    auto generator = gw(c_.endpoints.generator);
    auto embedder = gw(c_.endpoints.embedder);

    generate::GenerationSettings settings;
    settings.per_call = c_.generation.per_call;
    settings.retry_budget = c_.generation.retry_budget;
    settings.k = c_.k;
    settings.temperature = c_.generation.temperature;
    settings.max_output_tokens = c_.generation.max_output_tokens;
    settings.seed = c_.seed;

    const auto& cats = taxonomy.categories;
    std::vector<generate::BatchResult> results(cats.size());
    const auto workers = static_cast<std::size_t>(std::max(1, c_.endpoints.generator.max_concurrent));
    parallel_for(cats.size(), workers, [&](std::size_t i) {
      const auto& cat = cats[i];
      const auto wanted = static_cast<std::size_t>(
          std::ceil(static_cast<double>(cat.target_count) * c_.generation.oversample));
      generate::BatchTarget target;
      target.min = std::max(c_.generation.min_entries, wanted);
      target.max = std::max(c_.generation.max_entries, target.min);
      const auto query = generate::category_query(cat.name, cat.toc_headings, corpus);
      results[i] = generate::generate_category_batch(cat.name, query, target, corpus, *generator,
                                                     *embedder, tmpl, settings);
    });

    std::vector<generate::QAEntry> all;
    std::size_t calls = 0, failed = 0, short_cats = 0;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      auto& r = results[i];
      calls += r.calls;
      failed += r.failed_calls;
      if (r.budget_exhausted) {
        ++short_cats;
        note("warning: " + cats[i].name + ": retry budget exhausted with " +
             std::to_string(r.entries.size()) + " entries");
      }
      all.insert(all.end(), std::make_move_iterator(r.entries.begin()),
                 std::make_move_iterator(r.entries.end()));
    }
    write_file_atomic(ws_.raw(), generate::entries_to_jsonl(all));
    return std::to_string(all.size()) + " raw entries from " + std::to_string(calls) + " calls (" +
           std::to_string(failed) + " unusable, " + std::to_string(short_cats) +
           " categories short)";
  }

  std::string curate_stage() {
    const auto raw = generate::entries_from_jsonl(read_file(ws_.raw()));
    const auto taxonomy = curate::parse_taxonomy(read_file(c_.taxonomy));
    curate::CurationSettings settings;
    settings.near_dup_threshold = c_.curation.near_dup_threshold;
    settings.rules = c_.curation.rules;
    auto result = curate::curate(raw, taxonomy, settings);
    result.manifest.config = config_snapshot(c_);
    const auto manifest = curate::export_dataset(result.accepted, ws_.dataset(), c_.curation.format,
                                                 std::move(result.manifest));
    curate::emit_train_config(ws_.train_config(), c_.train);
    return std::to_string(manifest.totals.accepted) + " accepted of " +
           std::to_string(manifest.totals.raw) + " raw, " + std::to_string(manifest.word_count) +
           " words";
  }

  std::string evaluate() {
    const auto corpus = index::Corpus::load(ws_.index());
    auto question_gen = gw(c_.endpoints.generator);
    auto a = gw(c_.endpoints.candidate_a);
    auto b = gw(c_.endpoints.candidate_b);
    auto judge = gw(c_.endpoints.judge);
    judge::EvalSettings settings;
    settings.question_temperature = c_.eval.question_temperature;
    settings.judge_temperature = c_.eval.judge_temperature;
    settings.resample_budget = c_.eval.resample_budget;
    settings.workers = c_.eval.workers;
    const auto report = judge::run_evaluation(corpus, c_.eval.n_questions,
                                              static_cast<std::uint64_t>(c_.seed),
                                              {*question_gen, *a, *b, *judge}, settings);
    write_file_atomic(ws_.report_json(), judge::report_to_json(report));
    write_file_atomic(ws_.report_txt(), judge::report_table(report));
    return report.model_a + " " + std::to_string(report.total_a) + " vs " + report.model_b + " " +
           std::to_string(report.total_b) + " over " + std::to_string(report.n_questions) +
           " questions";
  }

  const PipelineConfig& c_;
  const RunOptions& o_;
  Workspace ws_;
};

}  // namespace

std::vector<StageReport> run_pipeline(const PipelineConfig& config, std::span<const Stage> stages,
                                      const RunOptions& options) {
  std::error_code ec;
  fs::create_directories(config.workspace / "stages", ec);
  if (ec) throw StageFailed(stages.empty() ? Stage::Ingest : stages.front(),
                            "cannot create workspace " + config.workspace.string() + ": " + ec.message());
  Runner runner(config, options);
  std::vector<StageReport> out;
  for (auto st : kAllStages) {
    if (std::find(stages.begin(), stages.end(), st) == stages.end()) continue;
    auto r = runner.run(st);
    if (options.progress) {
      options.progress(std::string(to_string(st)) + ": " + (r.skipped ? "skipped, " : "") + r.summary);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ragds::pipeline
