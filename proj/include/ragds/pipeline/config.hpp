#pragma once

#include "ragds/common/error.hpp"
#include "ragds/curate/export.hpp"
#include "ragds/curate/quality.hpp"
#include "ragds/curate/train_config.hpp"
#include "ragds/gateway/types.hpp"
#include "ragds/index/chunker.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ragds::pipeline {

/// Every problem found in a config, not just the first.
class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct Endpoints {
  gateway::EndpointProfile generator;
  gateway::EndpointProfile embedder;
  gateway::EndpointProfile judge;
  gateway::EndpointProfile candidate_a;
  gateway::EndpointProfile candidate_b;
};

struct GenerationConfig {
  std::size_t min_entries = 60;
  std::size_t max_entries = 100;
  /// Per-category raw target is ceil(target_count * oversample), raised to
  /// at least min_entries, so curation losses can be absorbed.
  double oversample = 1.25;
  std::size_t per_call = 10;
  std::size_t retry_budget = 10;
  double temperature = 0.7;
  int max_output_tokens = 4096;
  /// Empty: built-in category prompt.
  std::filesystem::path template_path;
};

struct CurationConfig {
  double near_dup_threshold = 0.8;
  curate::QualityRules rules;
  curate::FormatMode format = curate::FormatMode::Figure2;
};

struct EvalConfig {
  std::size_t n_questions = 80;
  double question_temperature = 0.7;
  double judge_temperature = 0.0;
  std::size_t resample_budget = 0;
  std::size_t workers = 4;
};

struct OfflineConfig {
  bool enabled = false;
  double malformed_rate = 0.0;
};

struct PipelineConfig {
  std::filesystem::path tei;
  std::filesystem::path workspace;
  std::filesystem::path taxonomy;
  Endpoints endpoints;
  index::ChunkPolicy chunking;
  std::size_t k = 4;
  GenerationConfig generation;
  CurationConfig curation;
  EvalConfig eval;
  curate::TrainConfig train;
  std::int64_t seed = 0;
  OfflineConfig offline;
};

struct ValidateOptions {
  /// Same as offline.enabled = true (the --offline flag).
  bool force_offline = false;
};

/// Parses and checks a JSON config. Relative paths resolve against
/// `base_dir`; referenced input files must exist. Unknown keys are
/// violations, reported with the nearest valid sibling key.
PipelineConfig validate_config(std::string_view bytes, const std::filesystem::path& base_dir,
                               const ValidateOptions& options = {});

PipelineConfig load_config(const std::filesystem::path& path, const ValidateOptions& options = {});

/// The effective knobs, without filesystem paths or credentials, as
/// recorded in the manifest. Identical configs in different directories
/// snapshot identically.
nlohmann::ordered_json config_snapshot(const PipelineConfig& config);

nlohmann::ordered_json profile_snapshot(const gateway::EndpointProfile& profile);

}  // namespace ragds::pipeline
