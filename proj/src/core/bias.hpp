#pragma once

#include "core/common.hpp"
#include "core/graph.hpp"
#include "core/model.hpp"

namespace advdrop {

// Per-edge bias head: logit(u,i) = w . [z_u^(0) || z_i^(0)] + b, bias
// probability = sigmoid(logit). Reads layer-0 embeddings only.
struct BiasHead {
  Vec w;  // 2d
  double b = 0.0;

  static BiasHead zeros(std::int32_t dim) {
    BiasHead h;
    h.w = Vec::Zero(2 * dim);
    return h;
  }
  std::int32_t dim() const { return static_cast<std::int32_t>(w.size() / 2); }
};

// Logit per edge, in edge order.
Vec bias_logits(const BiasHead& head, const EmbeddingModel& model,
                const InteractionGraph& graph);

Vec bias_probabilities(const Vec& logits);

// m_plus_e ~ Bern(p_e), m_minus_e ~ Bern(1 - p_e), independent bits.
MaskPair sample_masks(const Eigen::Ref<const Vec>& p_b, Rng& rng);

// The two antithetically coupled uniform draws behind one gradient
// estimate; one value of each per edge.
struct ArmSample {
  Vec v1;
  Vec v2;

  static ArmSample draw(Eigen::Index n_edges, Rng& rng);
};

// The two mask-pair constructions whose loss difference feeds the
// estimator:
//   gt: m+ = 1[v1 > sigmoid(-phi)], m- = 1[v2 > sigmoid(phi)]
//   lt: m+ = 1[v1 < sigmoid(phi)],  m- = 1[v2 < sigmoid(-phi)]
struct ArmMaskPairs {
  MaskPair gt;
  MaskPair lt;
};

ArmMaskPairs arm_mask_pairs(const Eigen::Ref<const Vec>& logits,
                            const ArmSample& u);

// Single-sample unbiased estimate of d E[L]/d logit per edge:
// (loss_gt - loss_lt) * (v1 - v2).
Vec arm_gradient(double loss_gt, double loss_lt, const ArmSample& u);

struct BiasHeadGrad {
  Vec w;
  double b = 0.0;
};

// Chain rule from per-edge logit gradients into (w, b); layer-0
// embeddings are treated as constants.
BiasHeadGrad bias_head_backward(const Eigen::Ref<const Vec>& grad_logits,
                                const EmbeddingModel& model,
                                const InteractionGraph& graph);

}  // namespace advdrop
