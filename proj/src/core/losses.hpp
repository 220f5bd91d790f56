#pragma once

#include <vector>

#include "core/common.hpp"

namespace advdrop {

// Pairwise ranking loss: sum of -log sigmoid(pos - neg), evaluated as
// softplus(neg - pos) for stability. Gradients are w.r.t. the scores.
struct BprResult {
  double loss = 0.0;
  Vec grad_pos;
  Vec grad_neg;
};

BprResult bpr_loss(const Eigen::Ref<const Vec>& scores_pos,
                   const Eigen::Ref<const Vec>& scores_neg);

// Nodes whose cross-view representations enter the invariance loss.
// Members act as anchors and as each other's negatives (in-batch).
struct ContrastBatch {
  std::vector<std::int32_t> users;
  std::vector<std::int32_t> items;
  double tau = 0.1;
};

// Draws min(max_samples, n) users and items without replacement.
ContrastBatch sample_contrast_batch(std::int32_t n_users,
                                    std::int32_t n_items,
                                    std::int32_t max_samples, double tau,
                                    Rng& rng);

// InfoNCE across the two views, user term + item term. Anchors live in
// the plus view, candidates in the minus view; similarity is cosine and
// every similarity is divided by tau. rep_* are full node matrices
// (users first); gradients come back in the same layout.
struct InfoNceResult {
  double loss_users = 0.0;
  double loss_items = 0.0;
  Mat grad_plus;
  Mat grad_minus;

  double loss() const { return loss_users + loss_items; }
};

InfoNceResult infonce_loss(const Mat& rep_plus, const Mat& rep_minus,
                           const ContrastBatch& batch, std::int32_t n_users,
                           bool want_grad = true);

inline double combined_objective(double rec_plus, double rec_minus,
                                 double inv, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  return rec_plus + rec_minus + lambda * inv;
}

}  // namespace advdrop
