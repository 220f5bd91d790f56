#include "core/model.hpp"

namespace advdrop {

Mat EmbeddingModel::base() const {
  Mat z(user_embed.rows() + item_embed.rows(), user_embed.cols());
  z.topRows(user_embed.rows()) = user_embed;
  z.bottomRows(item_embed.rows()) = item_embed;
  return z;
}

EmbeddingModel init_model(std::int32_t n_users, std::int32_t n_items,
                          std::int32_t dim, std::int32_t n_layers,
                          std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
  if (n_layers < 0) throw std::invalid_argument("layer count must be >= 0");
  EmbeddingModel m;
  m.n_layers = n_layers;
  m.user_embed.resize(n_users, dim);
  m.item_embed.resize(n_items, dim);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (std::int32_t r = 0; r < n_users; ++r)
    for (std::int32_t c = 0; c < dim; ++c) m.user_embed(r, c) = gauss(rng);
  for (std::int32_t r = 0; r < n_items; ++r)
    for (std::int32_t c = 0; c < dim; ++c) m.item_embed(r, c) = gauss(rng);
  return m;
}

PropagationTrace propagate(const EmbeddingModel& model,
                           const NormalizedAdjacency& adj) {
  const auto n_nodes = model.n_users() + model.n_items();
  if (adj.num_nodes() != n_nodes) {
    throw std::invalid_argument(
        "adjacency dimension " + std::to_string(adj.num_nodes()) +
        " does not match node count " + std::to_string(n_nodes));
  }
  PropagationTrace trace;
  trace.adj = adj;
  trace.layers.reserve(model.n_layers + 1);
  trace.layers.push_back(model.base());
  for (std::int32_t l = 1; l <= model.n_layers; ++l) {
    trace.layers.push_back(adj.mat() * trace.layers.back());
  }
  return trace;
}

Mat readout(const PropagationTrace& trace) {
  Mat sum = trace.layers[0];
  for (std::size_t l = 1; l < trace.layers.size(); ++l) {
    sum += trace.layers[l];
  }
  return sum / static_cast<double>(trace.layers.size());
}

Mat backward_propagate(const PropagationTrace& trace,
                       const Mat& grad_readout) {
  if (grad_readout.rows() != trace.layers[0].rows() ||
      grad_readout.cols() != trace.layers[0].cols()) {
    throw std::invalid_argument("gradient shape does not match trace");
  }
  Mat acc = grad_readout;
  Mat hop = grad_readout;
  const std::int32_t L = trace.n_layers();
  for (std::int32_t l = 1; l <= L; ++l) {
    hop = trace.adj.mat() * hop;
    acc += hop;
  }
  return acc / static_cast<double>(L + 1);
}

}  // namespace advdrop
