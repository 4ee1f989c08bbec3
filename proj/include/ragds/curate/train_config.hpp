#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ragds::curate {

/// LoRA fine-tuning hyperparameters handed to an external trainer.
struct TrainConfig {
  double learning_rate = 5e-5;
  int lora_r = 16;
  int batch_size = 2;
  int epochs = 10;
  int gradient_accumulation = 8;
  std::string lr_scheduler = "cosine";

  bool operator==(const TrainConfig&) const = default;
};

/// Throws std::invalid_argument on non-positive values or a scheduler
/// other than cosine, linear or constant.
void validate(const TrainConfig& cfg);

/// Flat JSON object, keys in declaration order.
std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(std::string_view bytes);

void emit_train_config(const std::filesystem::path& path, const TrainConfig& cfg = {});

}  // namespace ragds::curate
