#include "core/bias.hpp"

namespace advdrop {

Vec bias_logits(const BiasHead& head, const EmbeddingModel& model,
                const InteractionGraph& graph) {
  const std::int32_t d = model.dim();
  if (head.w.size() != 2 * d) {
    throw std::invalid_argument("bias head width does not match embedding dim");
  }
  const auto wu = head.w.head(d);
  const auto wi = head.w.tail(d);
  Vec logits(graph.num_edges());
  for (std::int64_t e = 0; e < graph.num_edges(); ++e) {
    const auto& [u, i] = graph.edges[e];
    logits[e] = wu.dot(model.user_embed.row(u)) +
                wi.dot(model.item_embed.row(i)) + head.b;
  }
  return logits;
}

Vec bias_probabilities(const Vec& logits) {
  return logits.unaryExpr([](double x) { return sigmoid(x); });
}

MaskPair sample_masks(const Eigen::Ref<const Vec>& p_b, Rng& rng) {
  MaskPair mp;
  mp.m_plus.resize(p_b.size());
  mp.m_minus.resize(p_b.size());
  for (Eigen::Index e = 0; e < p_b.size(); ++e) {
    mp.m_plus[e] = uniform01(rng) < p_b[e] ? 1 : 0;
    mp.m_minus[e] = uniform01(rng) < 1.0 - p_b[e] ? 1 : 0;
  }
  return mp;
}

ArmSample ArmSample::draw(Eigen::Index n_edges, Rng& rng) {
  ArmSample s;
  s.v1.resize(n_edges);
  s.v2.resize(n_edges);
  for (Eigen::Index e = 0; e < n_edges; ++e) s.v1[e] = uniform01(rng);
  for (Eigen::Index e = 0; e < n_edges; ++e) s.v2[e] = uniform01(rng);
  return s;
}

ArmMaskPairs arm_mask_pairs(const Eigen::Ref<const Vec>& logits,
                            const ArmSample& u) {
  if (u.v1.size() != logits.size() || u.v2.size() != logits.size()) {
    throw std::invalid_argument("uniform draw length does not match logits");
  }
  const Eigen::Index n = logits.size();
  ArmMaskPairs out;
  out.gt.m_plus.resize(n);
  out.gt.m_minus.resize(n);
  out.lt.m_plus.resize(n);
  out.lt.m_minus.resize(n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const double sp = sigmoid(logits[e]);
    const double sn = sigmoid(-logits[e]);
    out.gt.m_plus[e] = u.v1[e] > sn ? 1 : 0;
    out.gt.m_minus[e] = u.v2[e] > sp ? 1 : 0;
    out.lt.m_plus[e] = u.v1[e] < sp ? 1 : 0;
    out.lt.m_minus[e] = u.v2[e] < sn ? 1 : 0;
  }
  return out;
}

Vec arm_gradient(double loss_gt, double loss_lt, const ArmSample& u) {
  return (loss_gt - loss_lt) * (u.v1 - u.v2);
}

BiasHeadGrad bias_head_backward(const Eigen::Ref<const Vec>& grad_logits,
                                const EmbeddingModel& model,
                                const InteractionGraph& graph) {
  if (grad_logits.size() != graph.num_edges()) {
    throw std::invalid_argument("gradient length does not match edge count");
  }
  const std::int32_t d = model.dim();
  BiasHeadGrad g;
  g.w = Vec::Zero(2 * d);
  auto gu = g.w.head(d);
  auto gi = g.w.tail(d);
  for (std::int64_t e = 0; e < graph.num_edges(); ++e) {
    const auto& [u, i] = graph.edges[e];
    gu += grad_logits[e] * model.user_embed.row(u).transpose();
    gi += grad_logits[e] * model.item_embed.row(i).transpose();
    g.b += grad_logits[e];
  }
  return g;
}

}  // namespace advdrop
