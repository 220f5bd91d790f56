#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace advdrop {

// All knobs of the two-stage training loop. Presets bake in the
// per-dataset defaults; a flat key=value file and individual set() calls
// layer on top (CLI > file > preset).
struct TrainConfig {
  std::int32_t k_stage1 = 7;   // representation-learning epochs per round
  std::int32_t k_stage2 = 10;  // bias-identification epochs per round
  double lr_main = 1e-3;
  double lr_adv = 1e-2;
  double lambda = 1.0;
  double tau = 0.1;
  std::int32_t embed_dim = 30;
  std::int32_t batch_size = 128;
  std::int32_t n_layers = 2;
  std::int32_t contrast_samples = 100;
  std::int32_t max_rounds = 500;
  bool early_stop = true;
  std::int32_t patience = 10;
  double min_delta = 0.0;     // required validation improvement
  double val_fraction = 0.1;  // per-user holdout when no validation split
  std::int32_t val_k = 3;     // NDCG cutoff for early stopping
  std::uint64_t seed = 0;
  // full | no_pb | no_pb_no_inv | pop_drop | backbone
  std::string ablation = "full";

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static std::vector<std::string> keys();

  static TrainConfig preset(const std::string& name);
  static std::vector<std::string> preset_names();

  void load_file(const std::string& path);
  std::string to_key_values() const;
  void validate() const;
};

}  // namespace advdrop
