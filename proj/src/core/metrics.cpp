#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace advdrop {

RankedList rank_items(const Eigen::Ref<const Vec>& scores,
                      const std::vector<std::int32_t>& excluded) {
  RankedList out;
  out.items.reserve(scores.size());
  for (std::int32_t i = 0; i < scores.size(); ++i) {
    if (!std::binary_search(excluded.begin(), excluded.end(), i)) {
      out.items.push_back(i);
    }
  }
  std::stable_sort(out.items.begin(), out.items.end(),
                   [&scores](std::int32_t a, std::int32_t b) {
                     if (scores[a] != scores[b]) return scores[a] > scores[b];
                     return a < b;
                   });
  return out;
}

static bool is_relevant(const std::vector<std::int32_t>& relevant,
                        std::int32_t item) {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

double ndcg_at_k(const RankedList& ranked,
                 const std::vector<std::int32_t>& relevant, std::int32_t k) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  if (relevant.empty()) throw std::invalid_argument("empty relevant set");
  const std::int32_t top =
      std::min<std::int32_t>(k, static_cast<std::int32_t>(ranked.items.size()));
  double dcg = 0.0;
  for (std::int32_t r = 1; r <= top; ++r) {
    if (is_relevant(relevant, ranked.items[r - 1])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
  }
  const std::int32_t ideal =
      std::min<std::int32_t>(k, static_cast<std::int32_t>(relevant.size()));
  double idcg = 0.0;
  for (std::int32_t r = 1; r <= ideal; ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  }
  return dcg / idcg;
}

double recall_at_k(const RankedList& ranked,
                   const std::vector<std::int32_t>& relevant, std::int32_t k) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  if (relevant.empty()) throw std::invalid_argument("empty relevant set");
  const std::int32_t top =
      std::min<std::int32_t>(k, static_cast<std::int32_t>(ranked.items.size()));
  std::int32_t hits = 0;
  for (std::int32_t r = 0; r < top; ++r) {
    if (is_relevant(relevant, ranked.items[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double prediction_bias(const Mat& scores, const AttributeTable& attr) {
  const bool user_side = attr.side == AttributeTable::Side::user;
  const Eigen::Index n_grouped = user_side ? scores.rows() : scores.cols();
  const Eigen::Index n_outer = user_side ? scores.cols() : scores.rows();
  if (static_cast<Eigen::Index>(attr.labels.size()) != n_grouped) {
    throw std::invalid_argument("attribute table size does not match scores");
  }
  const std::int32_t n_labels = attr.n_labels();
  std::vector<std::int64_t> group_count(n_labels, 0);
  for (std::int32_t lab : attr.labels) {
    if (lab >= n_labels) {
      throw std::invalid_argument("attribute label out of range");
    }
    if (lab >= 0) ++group_count[lab];
  }
  const auto populated = std::count_if(group_count.begin(), group_count.end(),
                                       [](std::int64_t c) { return c > 0; });
  if (populated < 2) {
    throw std::invalid_argument(
        "prediction bias needs at least two populated attribute groups");
  }

  double total = 0.0;
  std::vector<double> group_sum(n_labels);
  for (Eigen::Index o = 0; o < n_outer; ++o) {
    std::fill(group_sum.begin(), group_sum.end(), 0.0);
    for (Eigen::Index g = 0; g < n_grouped; ++g) {
      const std::int32_t lab = attr.labels[g];
      if (lab < 0) continue;
      group_sum[lab] += user_side ? scores(g, o) : scores(o, g);
    }
    double worst = 0.0;
    for (std::int32_t a = 0; a < n_labels; ++a) {
      if (group_count[a] == 0) continue;
      for (std::int32_t b = a + 1; b < n_labels; ++b) {
        if (group_count[b] == 0) continue;
        const double gap = std::abs(group_sum[a] / group_count[a] -
                                    group_sum[b] / group_count[b]);
        worst = std::max(worst, gap);
      }
    }
    total += worst;
  }
  return total / static_cast<double>(n_outer);
}

AttributeTable popularity_groups(const InteractionGraph& g,
                                 std::int32_t n_groups) {
  if (n_groups < 2) throw std::invalid_argument("need at least 2 groups");
  if (g.n_items < n_groups) {
    throw std::invalid_argument("fewer items than popularity groups");
  }
  std::vector<std::int32_t> order(g.n_items);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&g](std::int32_t a, std::int32_t b) {
    const auto da = g.degree[g.item_node(a)];
    const auto db = g.degree[g.item_node(b)];
    if (da != db) return da < db;
    return a < b;
  });
  AttributeTable t;
  t.name = "popularity";
  t.side = AttributeTable::Side::item;
  t.labels.assign(g.n_items, 0);
  for (std::int32_t rank = 0; rank < g.n_items; ++rank) {
    t.labels[order[rank]] = static_cast<std::int32_t>(
        (static_cast<std::int64_t>(rank) * n_groups) / g.n_items);
  }
  for (std::int32_t k = 0; k < n_groups; ++k) {
    t.label_names.push_back(std::to_string(k));
  }
  return t;
}

EvalResult evaluate_ranking(
    const Mat& user_reps, const Mat& item_reps,
    const std::vector<std::vector<std::int32_t>>& excluded_per_user,
    const std::vector<std::vector<std::int32_t>>& relevant_per_user,
    const std::vector<std::int32_t>& ks,
    const std::vector<AttributeTable>& attrs) {
  const auto n_users = user_reps.rows();
  EvalResult res;
  std::map<std::int32_t, double> ndcg_sum, recall_sum;
  for (auto k : ks) {
    ndcg_sum[k] = 0.0;
    recall_sum[k] = 0.0;
  }
  const Mat scores = user_reps * item_reps.transpose();
  for (Eigen::Index u = 0; u < n_users; ++u) {
    const auto& relevant = relevant_per_user[u];
    if (relevant.empty()) continue;
    ++res.users_counted;
    const RankedList ranked =
        rank_items(scores.row(u).transpose(), excluded_per_user[u]);
    for (auto k : ks) {
      ndcg_sum[k] += ndcg_at_k(ranked, relevant, k);
      recall_sum[k] += recall_at_k(ranked, relevant, k);
    }
  }
  for (auto k : ks) {
    res.ndcg[k] = res.users_counted ? ndcg_sum[k] / res.users_counted : 0.0;
    res.recall[k] =
        res.users_counted ? recall_sum[k] / res.users_counted : 0.0;
  }
  for (const auto& attr : attrs) {
    res.pred_bias[attr.name] = prediction_bias(scores, attr);
  }
  return res;
}

}  // namespace advdrop
