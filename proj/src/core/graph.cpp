#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace advdrop {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

InteractionGraph build_graph(std::int32_t n_users, std::int32_t n_items,
                             std::span<const Edge> interactions) {
  if (interactions.empty()) {
    throw std::invalid_argument("empty graph");
  }
  InteractionGraph g;
  g.n_users = n_users;
  g.n_items = n_items;
  g.edges.assign(interactions.begin(), interactions.end());
  for (const auto& [u, i] : g.edges) {
    if (u < 0 || i < 0 || u >= n_users || i >= n_items) {
      throw std::invalid_argument("edge index out of range: (" +
                                  std::to_string(u) + "," + std::to_string(i) +
                                  ")");
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.degree.assign(g.num_nodes(), 0);
  for (const auto& [u, i] : g.edges) {
    ++g.degree[u];
    ++g.degree[g.item_node(i)];
  }
  return g;
}

InteractionGraph build_graph(std::span<const Edge> interactions) {
  std::int32_t n_users = 0;
  std::int32_t n_items = 0;
  for (const auto& [u, i] : interactions) {
    n_users = std::max(n_users, u + 1);
    n_items = std::max(n_items, i + 1);
  }
  return build_graph(n_users, n_items, interactions);
}

InteractionGraph apply_mask(const InteractionGraph& g, const EdgeMask& mask) {
  if (mask.size() != g.edges.size()) {
    throw std::invalid_argument("mask length " + std::to_string(mask.size()) +
                                " does not match edge count " +
                                std::to_string(g.edges.size()));
  }
  InteractionGraph sub;
  sub.n_users = g.n_users;
  sub.n_items = g.n_items;
  sub.degree.assign(g.num_nodes(), 0);
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (mask[e]) {
      const auto& [u, i] = g.edges[e];
      sub.edges.emplace_back(u, i);
      ++sub.degree[u];
      ++sub.degree[sub.item_node(i)];
    }
  }
  return sub;
}

static NormalizedAdjacency normalize_impl(const InteractionGraph& g,
                                          const EdgeMask* mask) {
  if (mask != nullptr && mask->size() != g.edges.size()) {
    throw std::invalid_argument("mask length does not match edge count");
  }
  const std::int32_t n = g.num_nodes();
  std::vector<std::int32_t> deg(n, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (mask == nullptr || (*mask)[e]) {
      ++deg[g.edges[e].first];
      ++deg[g.item_node(g.edges[e].second)];
    }
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (mask != nullptr && !(*mask)[e]) continue;
    const std::int32_t u = g.edges[e].first;
    const std::int32_t v = g.item_node(g.edges[e].second);
    const double w = 1.0 / std::sqrt(static_cast<double>(deg[u]) *
                                     static_cast<double>(deg[v]));
    trips.emplace_back(u, v, w);
    trips.emplace_back(v, u, w);
  }
  auto m = std::make_shared<SpMat>(n, n);
  m->setFromTriplets(trips.begin(), trips.end());
  return NormalizedAdjacency{std::move(m)};
}

NormalizedAdjacency normalize(const InteractionGraph& g) {
  return normalize_impl(g, nullptr);
}

NormalizedAdjacency normalize(const InteractionGraph& g,
                              const EdgeMask& mask) {
  return normalize_impl(g, &mask);
}

NormalizedAdjacency adjacency_from_matrix(SpMat m) {
  return NormalizedAdjacency{std::make_shared<SpMat>(std::move(m))};
}

EdgeMask full_mask(const InteractionGraph& g) {
  return EdgeMask(g.edges.size(), 1);
}

}  // namespace advdrop
