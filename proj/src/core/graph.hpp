#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "core/common.hpp"

namespace advdrop {

using Edge = std::pair<std::int32_t, std::int32_t>;  // (user, item)

// Bipartite user-item interaction graph. Nodes are indexed
// [0, n_users) for users and [n_users, n_users + n_items) for items.
// Edges are deduplicated and kept sorted by (user, item) so that a mask
// index always refers to the same edge across runs.
struct InteractionGraph {
  std::int32_t n_users = 0;
  std::int32_t n_items = 0;
  std::vector<Edge> edges;
  std::vector<std::int32_t> degree;  // per node, size n_users + n_items

  std::int32_t num_nodes() const { return n_users + n_items; }
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(edges.size());
  }
  std::int32_t item_node(std::int32_t item) const { return n_users + item; }
};

// One keep/drop bit per edge, aligned with InteractionGraph::edges.
using EdgeMask = std::vector<std::uint8_t>;

// Sampled bias-aware (m_plus) and bias-mitigated (m_minus) edge masks.
// The bits are independent; an edge may survive in both views or neither.
struct MaskPair {
  EdgeMask m_plus;
  EdgeMask m_minus;
};

InteractionGraph build_graph(std::int32_t n_users, std::int32_t n_items,
                             std::span<const Edge> interactions);

// Node counts inferred as max index + 1.
InteractionGraph build_graph(std::span<const Edge> interactions);

InteractionGraph apply_mask(const InteractionGraph& g, const EdgeMask& mask);

// Symmetrically normalized adjacency of a (possibly masked) graph:
// weight(u,i) = 1/sqrt(deg(u)*deg(i)) with degrees taken on the masked
// subgraph. Rows of isolated nodes are empty.
struct NormalizedAdjacency {
  std::shared_ptr<const SpMat> weights;

  const SpMat& mat() const { return *weights; }
  Eigen::Index num_nodes() const { return weights->rows(); }
};

NormalizedAdjacency normalize(const InteractionGraph& g);
NormalizedAdjacency normalize(const InteractionGraph& g, const EdgeMask& mask);

// Wraps an arbitrary symmetric matrix as a NormalizedAdjacency.
NormalizedAdjacency adjacency_from_matrix(SpMat m);

EdgeMask full_mask(const InteractionGraph& g);

}  // namespace advdrop
