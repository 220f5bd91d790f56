#pragma once

#include <string>

#include "core/bias.hpp"
#include "core/config.hpp"
#include "core/model.hpp"

namespace advdrop {

// Versioned binary snapshot of everything needed to evaluate or analyze
// a trained run: parameter tables, the exact config, and the trainer RNG
// state at exit. Layout (little endian):
//   bytes 0..7   magic "ADVDCKP1"
//   i32 x 4      n_users, n_items, dim, n_layers
//   f64 blocks   user_embed, item_embed (column-major), w (2*dim), b
//   u64 + bytes  config key=value text
//   u64 + bytes  RNG state string
struct Checkpoint {
  EmbeddingModel model;
  BiasHead head;
  TrainConfig config;
  std::string rng_state;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace advdrop
