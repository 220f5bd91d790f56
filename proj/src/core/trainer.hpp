#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "core/bias.hpp"
#include "core/config.hpp"
#include "core/data.hpp"
#include "core/model.hpp"

namespace advdrop {

constexpr double kBlank = std::numeric_limits<double>::quiet_NaN();

// One inner epoch of training. Blank (NaN) cells mean the quantity was
// not computed at that point; validation and prediction-bias columns are
// filled on the last epoch of each outer round.
struct HistoryRow {
  std::int32_t round = 0;
  std::int32_t stage = 0;
  std::int32_t epoch = 0;
  double loss_rec = kBlank;  // mean BPR per triplet per view
  double loss_inv = kBlank;  // mean InfoNCE per anchor
  double val_ndcg = kBlank;
  std::vector<double> pred_bias;
};

struct TrainResult {
  EmbeddingModel model;
  BiasHead head;
  std::vector<HistoryRow> history;
  std::vector<std::string> bias_attrs;  // pred_bias column order
  std::int32_t rounds = 0;
  double best_val_ndcg = kBlank;
  std::string rng_state;  // trainer RNG at exit
};

// Test hook, invoked after every inner epoch.
using EpochObserver =
    std::function<void(std::int32_t round, std::int32_t stage,
                       std::int32_t epoch, const EmbeddingModel& model,
                       const BiasHead& head)>;

// Alternating min-max training: stage 1 fixes the bias head and fits the
// embeddings to BPR on both sampled views plus the weighted invariance
// loss; stage 2 fixes the embeddings and ascends the invariance loss
// w.r.t. the bias head through the ARM estimator. Ablations:
//   full         - both stages
//   no_pb        - edge probabilities pinned at 0.5, stage 2 skipped
//   no_pb_no_inv - additionally lambda forced to 0
//   pop_drop     - probabilities fixed to the item-popularity percentile
//   backbone     - no dropout, no invariance loss, single-view BPR
TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const EpochObserver& observer = {});

// The (train, validation) pair exactly as train() uses it: an existing
// validation split wins; otherwise a per-user holdout is carved from the
// training split when cfg.val_fraction > 0.
std::pair<std::vector<Edge>, std::vector<Edge>> training_split(
    const TrainConfig& cfg, const Dataset& data);

// Stream of sub-seeds derived from the config seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Value of the invariance loss for one sampled mask pair (used by the
// ARM estimator; no gradients through the embeddings).
double invariance_loss_value(const EmbeddingModel& model,
                             const InteractionGraph& graph,
                             const MaskPair& masks,
                             const ContrastBatch& batch);

}  // namespace advdrop
