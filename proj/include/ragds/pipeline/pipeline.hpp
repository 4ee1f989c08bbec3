#pragma once

#include "ragds/common/error.hpp"
#include "ragds/gateway/types.hpp"
#include "ragds/pipeline/config.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ragds::pipeline {

enum class Stage { Ingest, Index, Generate, Curate, Eval };

inline constexpr std::array<Stage, 5> kAllStages = {Stage::Ingest, Stage::Index, Stage::Generate,
                                                    Stage::Curate, Stage::Eval};

std::string_view to_string(Stage s);
/// Throws std::invalid_argument for an unknown name.
Stage stage_from_string(std::string_view s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStage = 3;
inline constexpr int kExitEndpoint = 4;

class StageFailed : public Error {
 public:
  StageFailed(Stage stage, const std::string& what, int exit_code = kExitStage);
  Stage stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  Stage stage_;
  int exit_code_;
};

/// Per-artifact locations that replace the workspace defaults; empty
/// means "inside the workspace". Used by the standalone subcommand forms.
struct ArtifactPaths {
  std::filesystem::path document;
  std::filesystem::path index;
  std::filesystem::path raw;
  std::filesystem::path dataset;
  std::filesystem::path report_json;
};

/// Artifact locations inside a workspace directory. Manifest, provenance
/// and train config sit next to the dataset; report.txt next to report.json.
struct Workspace {
  std::filesystem::path root;
  ArtifactPaths custom;

  std::filesystem::path document() const { return pick(custom.document, "document.json"); }
  std::filesystem::path index() const { return pick(custom.index, "index.bin"); }
  std::filesystem::path raw() const { return pick(custom.raw, "raw.jsonl"); }
  std::filesystem::path dataset() const { return pick(custom.dataset, "dataset.jsonl"); }
  std::filesystem::path manifest() const;
  std::filesystem::path provenance() const;
  std::filesystem::path train_config() const { return dataset().parent_path() / "train_config.json"; }
  std::filesystem::path report_json() const { return pick(custom.report_json, "report.json"); }
  std::filesystem::path report_txt() const {
    return std::filesystem::path(report_json()).replace_extension(".txt");
  }
  std::filesystem::path record(Stage s) const;

 private:
  std::filesystem::path pick(const std::filesystem::path& p, const char* name) const {
    return p.empty() ? root / name : p;
  }
};

struct StageReport {
  Stage stage = Stage::Ingest;
  bool skipped = false;
  double seconds = 0.0;
  std::string summary;
};

struct RunOptions {
  /// Re-run stages even when their record says they are up to date.
  bool force = false;
  /// One human-readable line per event.
  std::function<void(std::string_view)> progress;
  gateway::LogSink gateway_log;
  ArtifactPaths artifacts;
};

/// A gateway for `profile`: the stub with the offline responder when the
/// config is offline, otherwise the HTTP client.
std::unique_ptr<gateway::Gateway> make_gateway(const gateway::EndpointProfile& profile,
                                               const PipelineConfig& config,
                                               const gateway::LogSink& log = {});

/// Runs the requested stages in pipeline order. Each stage writes its
/// artifacts atomically and then a record (inputs hash, config hash,
/// duration); a stage whose record matches the current inputs, config and
/// outputs is skipped. Throws StageFailed naming the stage; artifacts of
/// earlier stages are left untouched.
std::vector<StageReport> run_pipeline(const PipelineConfig& config, std::span<const Stage> stages,
                                      const RunOptions& options = {});

}  // namespace ragds::pipeline
