#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/adam.hpp"
#include "core/losses.hpp"

namespace advdrop {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::pair<std::vector<Edge>, std::vector<Edge>> training_split(
    const TrainConfig& cfg, const Dataset& data) {
  if (!data.validation.empty()) {
    return {data.train, data.validation};
  }
  if (cfg.val_fraction > 0.0 && !data.train.empty()) {
    return split_holdout(data.train, cfg.val_fraction,
                         derive_seed(cfg.seed, 11));
  }
  return {data.train, {}};
}

double invariance_loss_value(const EmbeddingModel& model,
                             const InteractionGraph& graph,
                             const MaskPair& masks,
                             const ContrastBatch& batch) {
  const auto adj_plus = normalize(graph, masks.m_plus);
  const auto adj_minus = normalize(graph, masks.m_minus);
  const Mat rep_plus = readout(propagate(model, adj_plus));
  const Mat rep_minus = readout(propagate(model, adj_minus));
  return infonce_loss(rep_plus, rep_minus, batch, graph.n_users,
                      /*want_grad=*/false)
      .loss();
}

namespace {

struct Triplet {
  std::int32_t user;
  std::int32_t pos;
  std::int32_t neg;
};

std::vector<std::vector<std::int32_t>> positives_by_user(
    std::int32_t n_users, const std::vector<Edge>& pairs) {
  std::vector<std::vector<std::int32_t>> out(n_users);
  for (const auto& [u, i] : pairs) out[u].push_back(i);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

// Uniform negative from the user's non-interacted items.
std::int32_t sample_negative(const std::vector<std::int32_t>& positives,
                             std::int32_t n_items, Rng& rng) {
  if (static_cast<std::int32_t>(positives.size()) >= n_items) return -1;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const auto j =
        static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n_items));
    if (!std::binary_search(positives.begin(), positives.end(), j)) return j;
  }
  return -1;
}

double mean_pb_scale(const InteractionGraph& graph) {
  return static_cast<double>(graph.n_items);
}

// Fixed popularity-percentile probabilities for the pop_drop ablation.
Vec popularity_edge_probs(const InteractionGraph& graph) {
  std::vector<std::int32_t> order(graph.n_items);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&graph](std::int32_t a, std::int32_t b) {
              const auto da = graph.degree[graph.item_node(a)];
              const auto db = graph.degree[graph.item_node(b)];
              if (da != db) return da < db;
              return a < b;
            });
  Vec item_prob(graph.n_items);
  for (std::int32_t rank = 0; rank < graph.n_items; ++rank) {
    item_prob[order[rank]] = (rank + 0.5) / mean_pb_scale(graph);
  }
  Vec probs(graph.num_edges());
  for (std::int64_t e = 0; e < graph.num_edges(); ++e) {
    probs[e] = item_prob[graph.edges[e].second];
  }
  return probs;
}

struct RoundEval {
  double val_ndcg = kBlank;
  std::vector<double> pred_bias;
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const EpochObserver& observer) {
  cfg.validate();
  if (data.train.empty()) throw std::invalid_argument("empty training split");

  const bool backbone = cfg.ablation == "backbone";
  const bool adversarial = cfg.ablation == "full";
  const bool dropout = !backbone;
  const double lambda = cfg.ablation == "no_pb_no_inv" || backbone
                            ? 0.0
                            : cfg.lambda;

  auto [train_main, validation] = training_split(cfg, data);
  if (train_main.empty()) throw std::invalid_argument("empty training split");
  const InteractionGraph graph =
      build_graph(data.n_users, data.n_items, train_main);
  const auto adj_full = normalize(graph);

  TrainResult res;
  res.model = init_model(data.n_users, data.n_items, cfg.embed_dim,
                         cfg.n_layers, derive_seed(cfg.seed, 1));
  res.head = BiasHead::zeros(cfg.embed_dim);
  Rng rng(derive_seed(cfg.seed, 2));

  Adam adam_user(res.model.user_embed.size(), {.lr = cfg.lr_main});
  Adam adam_item(res.model.item_embed.size(), {.lr = cfg.lr_main});
  Adam adam_head(res.head.w.size() + 1, {.lr = cfg.lr_adv});

  const auto user_pos = positives_by_user(data.n_users, train_main);
  const auto val_pos = positives_by_user(data.n_users, validation);

  // attributes usable for prediction bias (>= 2 populated groups)
  std::vector<const AttributeTable*> bias_attrs;
  for (const auto& attr : data.attributes) {
    std::vector<std::int64_t> counts(attr.n_labels(), 0);
    for (auto lab : attr.labels)
      if (lab >= 0) ++counts[lab];
    const auto populated =
        std::count_if(counts.begin(), counts.end(),
                      [](std::int64_t c) { return c > 0; });
    if (populated >= 2) {
      bias_attrs.push_back(&attr);
      res.bias_attrs.push_back(attr.name);
    }
  }

  const Vec pop_probs =
      cfg.ablation == "pop_drop" ? popularity_edge_probs(graph) : Vec();

  auto edge_probs = [&]() -> Vec {
    if (cfg.ablation == "full") {
      return bias_probabilities(bias_logits(res.head, res.model, graph));
    }
    if (cfg.ablation == "pop_drop") return pop_probs;
    return Vec::Constant(graph.num_edges(), 0.5);
  };

  auto round_eval = [&]() {
    RoundEval ev;
    const Mat rep = readout(propagate(res.model, adj_full));
    const Mat user_reps = rep.topRows(data.n_users);
    const Mat item_reps = rep.bottomRows(data.n_items);
    if (!validation.empty()) {
      double sum = 0.0;
      std::int64_t counted = 0;
      const Mat scores = user_reps * item_reps.transpose();
      for (std::int32_t u = 0; u < data.n_users; ++u) {
        if (val_pos[u].empty()) continue;
        const auto ranked = rank_items(scores.row(u).transpose(), user_pos[u]);
        sum += ndcg_at_k(ranked, val_pos[u], cfg.val_k);
        ++counted;
      }
      if (counted > 0) ev.val_ndcg = sum / static_cast<double>(counted);
    }
    if (!bias_attrs.empty()) {
      const Mat scores = user_reps * item_reps.transpose();
      for (const auto* attr : bias_attrs) {
        ev.pred_bias.push_back(prediction_bias(scores, *attr));
      }
    }
    return ev;
  };

  const std::int32_t k_stage2 = adversarial ? cfg.k_stage2 : 0;
  double best_val = -1.0;
  std::int32_t rounds_since_best = 0;

  for (std::int32_t round = 1; round <= cfg.max_rounds; ++round) {
    // ---- Stage 1: debiased representation learning (head fixed) ----
    for (std::int32_t k1 = 1; k1 <= cfg.k_stage1; ++k1) {
      NormalizedAdjacency adj_plus = adj_full;
      NormalizedAdjacency adj_minus;
      if (dropout) {
        const MaskPair masks = sample_masks(edge_probs(), rng);
        adj_plus = normalize(graph, masks.m_plus);
        adj_minus = normalize(graph, masks.m_minus);
      }

      std::vector<Triplet> triplets;
      triplets.reserve(train_main.size());
      for (const auto& [u, i] : train_main) {
        const auto j = sample_negative(user_pos[u], data.n_items, rng);
        if (j >= 0) triplets.push_back({u, i, j});
      }
      std::shuffle(triplets.begin(), triplets.end(), rng);

      double epoch_rec = 0.0;
      double epoch_inv = 0.0;
      std::int64_t inv_anchors = 0;
      const std::int64_t n_trip = static_cast<std::int64_t>(triplets.size());
      for (std::int64_t start = 0; start < n_trip;
           start += cfg.batch_size) {
        const auto stop =
            std::min<std::int64_t>(start + cfg.batch_size, n_trip);
        const auto b_size = stop - start;

        const PropagationTrace trace_plus = propagate(res.model, adj_plus);
        const Mat rep_plus = readout(trace_plus);
        PropagationTrace trace_minus;
        Mat rep_minus;
        if (dropout) {
          trace_minus = propagate(res.model, adj_minus);
          rep_minus = readout(trace_minus);
        }

        Mat g_plus = Mat::Zero(rep_plus.rows(), rep_plus.cols());
        Mat g_minus = dropout ? Mat::Zero(rep_plus.rows(), rep_plus.cols())
                              : Mat();

        auto bpr_view = [&](const Mat& rep, Mat& grad) {
          Vec pos(b_size), neg(b_size);
          for (std::int64_t k = 0; k < b_size; ++k) {
            const auto& t = triplets[start + k];
            pos[k] = rep.row(t.user).dot(rep.row(graph.item_node(t.pos)));
            neg[k] = rep.row(t.user).dot(rep.row(graph.item_node(t.neg)));
          }
          const BprResult r = bpr_loss(pos, neg);
          for (std::int64_t k = 0; k < b_size; ++k) {
            const auto& t = triplets[start + k];
            const double gp = r.grad_pos[k];
            grad.row(t.user) +=
                gp * (rep.row(graph.item_node(t.pos)) -
                      rep.row(graph.item_node(t.neg)));
            grad.row(graph.item_node(t.pos)) += gp * rep.row(t.user);
            grad.row(graph.item_node(t.neg)) -= gp * rep.row(t.user);
          }
          return r.loss;
        };

        epoch_rec += bpr_view(rep_plus, g_plus);
        if (dropout) epoch_rec += bpr_view(rep_minus, g_minus);

        if (lambda > 0.0 && dropout) {
          const ContrastBatch cb = sample_contrast_batch(
              data.n_users, data.n_items, cfg.contrast_samples, cfg.tau, rng);
          const InfoNceResult nce =
              infonce_loss(rep_plus, rep_minus, cb, data.n_users);
          epoch_inv += nce.loss();
          inv_anchors += static_cast<std::int64_t>(cb.users.size()) +
                         static_cast<std::int64_t>(cb.items.size());
          g_plus += lambda * nce.grad_plus;
          g_minus += lambda * nce.grad_minus;
        }

        Mat g_base = backward_propagate(trace_plus, g_plus);
        if (dropout) g_base += backward_propagate(trace_minus, g_minus);

        adam_user.step(
            {res.model.user_embed.data(),
             static_cast<std::size_t>(res.model.user_embed.size())},
            {g_base.data(),
             static_cast<std::size_t>(res.model.user_embed.size())});
        adam_item.step(
            {res.model.item_embed.data(),
             static_cast<std::size_t>(res.model.item_embed.size())},
            {g_base.data() + res.model.user_embed.size(),
             static_cast<std::size_t>(res.model.item_embed.size())});
      }

      HistoryRow row;
      row.round = round;
      row.stage = 1;
      row.epoch = k1;
      const double views = dropout ? 2.0 : 1.0;
      row.loss_rec = n_trip > 0
                         ? epoch_rec / (views * static_cast<double>(n_trip))
                         : kBlank;
      row.loss_inv =
          inv_anchors > 0 ? epoch_inv / static_cast<double>(inv_anchors)
                          : kBlank;
      if (!std::isfinite(epoch_rec) || !std::isfinite(epoch_inv)) {
        throw numeric_error("training diverged (non-finite loss) in round " +
                            std::to_string(round));
      }
      row.pred_bias.assign(bias_attrs.size(), kBlank);
      res.history.push_back(std::move(row));
      if (observer) observer(round, 1, k1, res.model, res.head);
    }

    // ---- Stage 2: adversarial bias identification (embeddings fixed) ----
    for (std::int32_t k2 = 1; k2 <= k_stage2; ++k2) {
      const Vec logits = bias_logits(res.head, res.model, graph);
      const ArmSample u = ArmSample::draw(graph.num_edges(), rng);
      const ArmMaskPairs pairs = arm_mask_pairs(logits, u);
      const ContrastBatch cb = sample_contrast_batch(
          data.n_users, data.n_items, cfg.contrast_samples, cfg.tau, rng);
      const double loss_gt =
          invariance_loss_value(res.model, graph, pairs.gt, cb);
      const double loss_lt =
          invariance_loss_value(res.model, graph, pairs.lt, cb);
      if (!std::isfinite(loss_gt) || !std::isfinite(loss_lt)) {
        throw numeric_error("training diverged (non-finite loss) in round " +
                            std::to_string(round));
      }
      const Vec grad_logits = arm_gradient(loss_gt, loss_lt, u);
      const BiasHeadGrad g = bias_head_backward(grad_logits, res.model, graph);

      // gradient ascent: Adam on the negated estimate
      std::vector<double> params(res.head.w.size() + 1);
      std::vector<double> grads(params.size());
      for (Eigen::Index k = 0; k < res.head.w.size(); ++k) {
        params[k] = res.head.w[k];
        grads[k] = -g.w[k];
      }
      params.back() = res.head.b;
      grads.back() = -g.b;
      adam_head.step(params, grads);
      for (Eigen::Index k = 0; k < res.head.w.size(); ++k) {
        res.head.w[k] = params[k];
      }
      res.head.b = params.back();

      HistoryRow row;
      row.round = round;
      row.stage = 2;
      row.epoch = k2;
      const double anchors = static_cast<double>(cb.users.size()) +
                             static_cast<double>(cb.items.size());
      row.loss_inv = 0.5 * (loss_gt + loss_lt) / anchors;
      row.pred_bias.assign(bias_attrs.size(), kBlank);
      res.history.push_back(std::move(row));
      if (observer) observer(round, 2, k2, res.model, res.head);
    }

    // ---- round end: validation metrics, bias trajectory, stopping ----
    res.rounds = round;
    const RoundEval ev = round_eval();
    if (!res.history.empty()) {
      auto& last = res.history.back();
      last.val_ndcg = ev.val_ndcg;
      if (!ev.pred_bias.empty()) last.pred_bias = ev.pred_bias;
    }
    if (!std::isnan(ev.val_ndcg) && cfg.early_stop) {
      if (ev.val_ndcg > best_val + cfg.min_delta) {
        best_val = ev.val_ndcg;
        rounds_since_best = 0;
      } else {
        ++rounds_since_best;
      }
      if (rounds_since_best >= cfg.patience) break;
    }
  }

  if (best_val >= 0.0) res.best_val_ndcg = best_val;
  std::ostringstream state;
  state << rng;
  res.rng_state = state.str();
  return res;
}

}  // namespace advdrop
