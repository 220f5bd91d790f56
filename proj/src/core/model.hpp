#pragma once

#include <vector>

#include "core/common.hpp"
#include "core/graph.hpp"

namespace advdrop {

// Layer-0 embedding tables plus the propagation depth. Propagation is
// linear neighborhood averaging (no transforms, no self loops); readout
// is the uniform mean over layers 0..L. L = 0 degenerates to matrix
// factorization.
struct EmbeddingModel {
  Mat user_embed;  // n_users x d
  Mat item_embed;  // n_items x d
  std::int32_t n_layers = 2;

  std::int32_t n_users() const {
    return static_cast<std::int32_t>(user_embed.rows());
  }
  std::int32_t n_items() const {
    return static_cast<std::int32_t>(item_embed.rows());
  }
  std::int32_t dim() const {
    return static_cast<std::int32_t>(user_embed.cols());
  }
  // Concatenated node matrix, users first.
  Mat base() const;
};

// Gaussian init, sigma = 0.1, reproducible from the seed.
EmbeddingModel init_model(std::int32_t n_users, std::int32_t n_items,
                          std::int32_t dim, std::int32_t n_layers,
                          std::uint64_t seed);

// Z^(0)..Z^(L) for one graph view, Z^(l) = A~ * Z^(l-1).
struct PropagationTrace {
  std::vector<Mat> layers;
  NormalizedAdjacency adj;

  std::int32_t n_layers() const {
    return static_cast<std::int32_t>(layers.size()) - 1;
  }
};

PropagationTrace propagate(const EmbeddingModel& model,
                           const NormalizedAdjacency& adj);

// Mean over layers 0..L; rows are final node representations.
Mat readout(const PropagationTrace& trace);

inline double score(const Eigen::Ref<const Vec>& z_u,
                    const Eigen::Ref<const Vec>& z_i) {
  return z_u.dot(z_i);
}

// Reverse of readout(propagate(.)): gradient of a scalar loss w.r.t. the
// layer-0 node matrix, given its gradient w.r.t. the readout. Since the
// adjacency is symmetric this is (1/(L+1)) * sum_l A~^l * G.
Mat backward_propagate(const PropagationTrace& trace, const Mat& grad_readout);

}  // namespace advdrop
