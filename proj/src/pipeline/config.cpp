#include "ragds/pipeline/config.hpp"

#include "ragds/common/fs.hpp"
#include "ragds/common/text.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace ragds::pipeline {
namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& d) {
  std::string out = "invalid config:";
  for (const auto& s : d) out += "\n  " + s;
  return out;
}

// Reads one JSON object, recording violations instead of throwing.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& diags)
      : obj_(obj), path_(std::move(path)), diags_(diags) {
    if (obj_ && !obj_->is_object()) {
      fail("", "must be an object");
      obj_ = nullptr;
    }
  }

  ~Section() {
    if (!obj_) return;
    for (const auto& [key, _] : obj_->items()) {
      if (known_.count(key)) continue;
      std::string best;
      std::size_t best_d = std::numeric_limits<std::size_t>::max();
      for (const auto& k : known_) {
        const auto d = text::levenshtein(key, k);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      std::string msg = "unknown key \"" + key + "\"";
      if (!best.empty()) msg += "; did you mean " + best + "?";
      diags_.push_back(qualify(key) + ": " + msg);
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string qualify(std::string_view key) const {
    if (path_.empty()) return std::string(key);
    if (key.empty()) return path_;
    return path_ + "." + std::string(key);
  }

  void fail(std::string_view key, const std::string& msg) { diags_.push_back(qualify(key) + ": " + msg); }

  const json* find(const std::string& key) {
    known_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  Section child(const std::string& key) { return Section(find(key), qualify(key), diags_); }
  bool has(const std::string& key) {
    known_.insert(key);
    return obj_ && obj_->contains(key);
  }

  double number(const std::string& key, double def, double lo, double hi, bool lo_open = false) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) {
      fail(key, "must be a number");
      return def;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x) || (lo_open ? x <= lo : x < lo) || x > hi) {
      fail(key, "must be in " + std::string(lo_open ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + "], got " + fmt(x));
      return def;
    }
    return x;
  }

  std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) {
      fail(key, "must be an integer");
      return def;
    }
    const auto x = v->get<std::int64_t>();
    if (x < lo || x > hi) {
      fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(x));
      return def;
    }
    return x;
  }

  std::string string(const std::string& key, std::string def, bool required = false) {
    const json* v = find(key);
    if (!v) {
      if (required) fail(key, "is required");
      return def;
    }
    if (!v->is_string() || v->get_ref<const std::string&>().empty()) {
      fail(key, "must be a non-empty string");
      return def;
    }
    return v->get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) {
      fail(key, "must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> def) {
    const json* v = find(key);
    if (!v) return def;
    std::vector<std::string> out;
    if (!v->is_array()) {
      fail(key, "must be an array of strings");
      return def;
    }
    for (const auto& e : *v) {
      if (!e.is_string() || e.get_ref<const std::string&>().empty()) {
        fail(key, "must contain only non-empty strings");
        return def;
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

 private:
  static std::string fmt(double x) {
    json j = x;
    return j.dump();
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& diags_;
  std::set<std::string> known_;
};

constexpr std::int64_t kBig = std::int64_t{1} << 40;

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

gateway::EndpointProfile read_profile(Section& parent, const std::string& role, bool offline) {
  gateway::EndpointProfile p;
  p.model = "offline-" + role;
  const bool present = parent.has(role);
  Section s = parent.child(role);
  if (!present) {
    if (!offline) s.fail("", "is required unless offline mode is enabled");
    return p;
  }
  p.base_url = s.string("base_url", "", !offline);
  p.model = s.string("model", p.model, true);
  p.credential_ref = s.string("credential_ref", "");
  p.timeout = std::chrono::milliseconds(
      std::llround(1000.0 * s.number("timeout_s", 60.0, 0.0, 3600.0, true)));
  p.max_attempts = static_cast<int>(s.integer("max_attempts", p.max_attempts, 1, 20));
  p.max_concurrent = static_cast<int>(s.integer("max_concurrent", p.max_concurrent, 1, 256));
  p.embed_batch_size = static_cast<int>(s.integer("embed_batch_size", p.embed_batch_size, 1, 4096));
  p.backoff_base = std::chrono::milliseconds(s.integer("backoff_base_ms", p.backoff_base.count(), 0, 60'000));
  if (!p.base_url.empty() && p.base_url.rfind("http://", 0) != 0 && p.base_url.rfind("https://", 0) != 0) {
    s.fail("base_url", "must start with http:// or https://");
  }
  return p;
}

}  // namespace

ConfigInvalid::ConfigInvalid(std::vector<std::string> diagnostics)
    : Error(join_lines(diagnostics)), diagnostics_(std::move(diagnostics)) {}

PipelineConfig validate_config(std::string_view bytes, const std::filesystem::path& base_dir,
                               const ValidateOptions& options) {
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid({std::string("not valid JSON: ") + e.what()});
  }

  std::vector<std::string> diags;
  PipelineConfig cfg;
  {
    Section top(&root, "", diags);

    {
      Section s = top.child("offline");
      cfg.offline.enabled = s.boolean("enabled", false) || options.force_offline;
      cfg.offline.malformed_rate = s.number("malformed_rate", 0.0, 0.0, 0.95);
    }
    if (!top.has("offline") && options.force_offline) cfg.offline.enabled = true;

    {
      Section s = top.child("paths");
      if (!top.has("paths")) top.fail("paths", "is required");
      const auto tei = s.string("tei", "", true);
      if (!tei.empty()) {
        cfg.tei = resolve_path(base_dir, tei);
        if (!std::filesystem::is_regular_file(cfg.tei)) s.fail("tei", "file not found: " + cfg.tei.string());
      }
      const auto ws = s.string("workspace", "", true);
      if (!ws.empty()) cfg.workspace = resolve_path(base_dir, ws);
    }

    const auto tax = top.string("taxonomy", "", true);
    if (!tax.empty()) {
      cfg.taxonomy = resolve_path(base_dir, tax);
      if (!std::filesystem::is_regular_file(cfg.taxonomy)) {
        top.fail("taxonomy", "file not found: " + cfg.taxonomy.string());
      }
    }

    {
      Section s = top.child("endpoints");
      if (!top.has("endpoints") && !cfg.offline.enabled) {
        top.fail("endpoints", "is required unless offline mode is enabled");
      }
      const bool off = cfg.offline.enabled;
      cfg.endpoints.generator = read_profile(s, "generator", off);
      cfg.endpoints.embedder = read_profile(s, "embedder", off);
      cfg.endpoints.judge = read_profile(s, "judge", off);
      cfg.endpoints.candidate_a = read_profile(s, "candidate_a", off);
      cfg.endpoints.candidate_b = read_profile(s, "candidate_b", off);
    }

    {
      Section s = top.child("chunking");
      cfg.chunking.max_tokens = static_cast<std::size_t>(s.integer("max_tokens", 256, 8, 8192));
      cfg.chunking.overlap_tokens = static_cast<std::size_t>(s.integer("overlap_tokens", 32, 0, 8192));
      if (cfg.chunking.overlap_tokens >= cfg.chunking.max_tokens) {
        s.fail("overlap_tokens", "must be less than chunking.max_tokens (" +
                                     std::to_string(cfg.chunking.overlap_tokens) +
                                     " >= " + std::to_string(cfg.chunking.max_tokens) + ")");
      }
    }

    {
      Section s = top.child("retrieval");
      cfg.k = static_cast<std::size_t>(s.integer("k", 4, 1, 64));
    }

    {
      Section s = top.child("generation");
      auto& g = cfg.generation;
      g.min_entries = static_cast<std::size_t>(s.integer("min_entries", 60, 1, 100'000));
      g.max_entries = static_cast<std::size_t>(s.integer("max_entries", 100, 1, 100'000));
      if (g.max_entries < g.min_entries) {
        s.fail("max_entries", "must be at least generation.min_entries");
      }
      g.oversample = s.number("oversample", 1.25, 1.0, 4.0);
      g.per_call = static_cast<std::size_t>(s.integer("per_call", 10, 1, 50));
      g.retry_budget = static_cast<std::size_t>(s.integer("retry_budget", 10, 1, 1000));
      g.temperature = s.number("temperature", 0.7, 0.0, 2.0);
      g.max_output_tokens = static_cast<int>(s.integer("max_output_tokens", 4096, 1, 131'072));
      const auto t = s.string("template", "");
      if (!t.empty()) {
        g.template_path = resolve_path(base_dir, t);
        if (!std::filesystem::is_regular_file(g.template_path)) {
          s.fail("template", "file not found: " + g.template_path.string());
        }
      }
    }

    {
      Section s = top.child("curation");
      auto& c = cfg.curation;
      c.near_dup_threshold = s.number("near_dup_threshold", 0.8, 0.0, 1.0, true);
      c.rules.min_instruction_chars =
          static_cast<std::size_t>(s.integer("min_instruction_chars", 12, 0, 100'000));
      c.rules.min_output_chars = static_cast<std::size_t>(s.integer("min_output_chars", 20, 0, 100'000));
      c.rules.refusal_phrases = s.strings("refusal_phrases", curate::QualityRules::default_refusal_phrases());
      const auto f = s.string("format", "figure2");
      try {
        c.format = curate::format_from_string(f);
      } catch (const std::exception&) {
        s.fail("format", "must be figure2 or alpaca, got \"" + f + "\"");
      }
    }

    {
      Section s = top.child("eval");
      auto& e = cfg.eval;
      e.n_questions = static_cast<std::size_t>(s.integer("n_questions", 80, 1, 100'000));
      e.question_temperature = s.number("question_temperature", 0.7, 0.0, 2.0);
      e.judge_temperature = s.number("judge_temperature", 0.0, 0.0, 2.0);
      e.resample_budget = static_cast<std::size_t>(s.integer("resample_budget", 0, 0, 100'000));
      e.workers = static_cast<std::size_t>(s.integer("workers", 4, 1, 64));
    }

    {
      Section s = top.child("train");
      auto& t = cfg.train;
      t.learning_rate = s.number("learning_rate", t.learning_rate, 0.0, 1.0, true);
      t.lora_r = static_cast<int>(s.integer("lora_r", t.lora_r, 1, 4096));
      t.batch_size = static_cast<int>(s.integer("batch_size", t.batch_size, 1, 4096));
      t.epochs = static_cast<int>(s.integer("epochs", t.epochs, 1, 10'000));
      t.gradient_accumulation =
          static_cast<int>(s.integer("gradient_accumulation", t.gradient_accumulation, 1, 4096));
      t.lr_scheduler = s.string("lr_scheduler", t.lr_scheduler);
      if (t.lr_scheduler != "cosine" && t.lr_scheduler != "linear" && t.lr_scheduler != "constant") {
        s.fail("lr_scheduler", "must be cosine, linear or constant");
      }
    }

    cfg.seed = top.integer("seed", 0, -kBig, kBig);
  }

  if (!diags.empty()) throw ConfigInvalid(std::move(diags));
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const ValidateOptions& options) {
  std::string bytes;
  try {
    bytes = fs::read_file(path);
  } catch (const IoFailure& e) {
    throw ConfigInvalid({e.what()});
  }
  return validate_config(bytes, std::filesystem::absolute(path).parent_path(), options);
}

nlohmann::ordered_json profile_snapshot(const gateway::EndpointProfile& p) {
  nlohmann::ordered_json j;
  j["base_url"] = p.base_url;
  j["model"] = p.model;
  j["max_attempts"] = p.max_attempts;
  j["max_concurrent"] = p.max_concurrent;
  return j;
}

nlohmann::ordered_json config_snapshot(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["offline"] = {{"enabled", c.offline.enabled}, {"malformed_rate", c.offline.malformed_rate}};
  j["endpoints"] = {{"generator", profile_snapshot(c.endpoints.generator)},
                    {"embedder", profile_snapshot(c.endpoints.embedder)},
                    {"judge", profile_snapshot(c.endpoints.judge)},
                    {"candidate_a", profile_snapshot(c.endpoints.candidate_a)},
                    {"candidate_b", profile_snapshot(c.endpoints.candidate_b)}};
  j["chunking"] = {{"max_tokens", c.chunking.max_tokens}, {"overlap_tokens", c.chunking.overlap_tokens}};
  j["retrieval"] = {{"k", c.k}};
  const auto& g = c.generation;
  j["generation"] = {{"min_entries", g.min_entries},     {"max_entries", g.max_entries},
                     {"oversample", g.oversample},       {"per_call", g.per_call},
                     {"retry_budget", g.retry_budget},   {"temperature", g.temperature},
                     {"max_output_tokens", g.max_output_tokens},
                     {"template", g.template_path.empty() ? "builtin" : g.template_path.filename().string()}};
  const auto& cu = c.curation;
  j["curation"] = {{"near_dup_threshold", cu.near_dup_threshold},
                   {"min_instruction_chars", cu.rules.min_instruction_chars},
                   {"min_output_chars", cu.rules.min_output_chars},
                   {"refusal_phrases", cu.rules.refusal_phrases},
                   {"format", std::string(curate::to_string(cu.format))}};
  const auto& e = c.eval;
  j["eval"] = {{"n_questions", e.n_questions},
               {"question_temperature", e.question_temperature},
               {"judge_temperature", e.judge_temperature},
               {"resample_budget", e.resample_budget}};
  j["train"] = nlohmann::ordered_json::parse(curate::train_config_to_json(c.train));
  j["seed"] = c.seed;
  return j;
}

}  // namespace ragds::pipeline
