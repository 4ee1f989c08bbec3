#include "ragds/curate/train_config.hpp"

#include "ragds/common/error.hpp"
#include "ragds/common/fs.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace ragds::curate {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (cfg.lora_r <= 0) throw std::invalid_argument("lora_r must be > 0");
  if (cfg.batch_size <= 0) throw std::invalid_argument("batch_size must be > 0");
  if (cfg.epochs <= 0) throw std::invalid_argument("epochs must be > 0");
  if (cfg.gradient_accumulation <= 0) {
    throw std::invalid_argument("gradient_accumulation must be > 0");
  }
  if (cfg.lr_scheduler != "cosine" && cfg.lr_scheduler != "linear" &&
      cfg.lr_scheduler != "constant") {
    throw std::invalid_argument("lr_scheduler must be cosine, linear or constant");
  }
}

std::string train_config_to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["learning_rate"] = cfg.learning_rate;
  j["lora_r"] = cfg.lora_r;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["gradient_accumulation"] = cfg.gradient_accumulation;
  j["lr_scheduler"] = cfg.lr_scheduler;
  return j.dump(2) + "\n";
}

TrainConfig train_config_from_json(std::string_view bytes) {
  try {
    const auto j = nlohmann::json::parse(bytes);
    TrainConfig cfg;
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.lora_r = j.at("lora_r").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.gradient_accumulation = j.at("gradient_accumulation").get<int>();
    cfg.lr_scheduler = j.at("lr_scheduler").get<std::string>();
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("train config: ") + e.what());
  }
}

void emit_train_config(const std::filesystem::path& path, const TrainConfig& cfg) {
  validate(cfg);
  fs::write_file_atomic(path, train_config_to_json(cfg));
}

}  // namespace ragds::curate
