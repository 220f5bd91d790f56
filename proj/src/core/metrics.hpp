#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/graph.hpp"

namespace advdrop {

// Categorical node attribute (user side or item side). label -1 marks an
// unlabeled node; labeled nodes carry exactly one label.
struct AttributeTable {
  enum class Side { user, item };

  std::string name;
  Side side = Side::user;
  std::vector<std::int32_t> labels;
  std::vector<std::string> label_names;

  std::int32_t n_labels() const {
    return static_cast<std::int32_t>(label_names.size());
  }
};

// Descending-score item ranking for one user, training positives removed.
struct RankedList {
  std::vector<std::int32_t> items;
};

// scores: this user's score per item; excluded: sorted item indices left
// out of the candidate set. Ties break toward the lower item index.
RankedList rank_items(const Eigen::Ref<const Vec>& scores,
                      const std::vector<std::int32_t>& excluded);

// relevant must be sorted. Users with no relevant items are the caller's
// responsibility to skip; these functions assume relevant is non-empty.
double ndcg_at_k(const RankedList& ranked,
                 const std::vector<std::int32_t>& relevant, std::int32_t k);
double recall_at_k(const RankedList& ranked,
                   const std::vector<std::int32_t>& relevant, std::int32_t k);

// Mean over items of the largest gap between user-group score averages
// (user-side attribute); item-side attributes swap the roles. scores is
// the full prediction matrix, scores(u, i).
double prediction_bias(const Mat& scores, const AttributeTable& attr);

// Items bucketed by ascending training-interaction count into equal-size
// quantile groups (ties broken by item index).
AttributeTable popularity_groups(const InteractionGraph& g,
                                 std::int32_t n_groups = 4);

// Full ranking evaluation over a test split.
struct EvalResult {
  std::map<std::int32_t, double> ndcg;    // by K
  std::map<std::int32_t, double> recall;  // by K
  std::int32_t users_counted = 0;         // users with >= 1 test item
  std::map<std::string, double> pred_bias;
};

EvalResult evaluate_ranking(
    const Mat& user_reps, const Mat& item_reps,
    const std::vector<std::vector<std::int32_t>>& excluded_per_user,
    const std::vector<std::vector<std::int32_t>>& relevant_per_user,
    const std::vector<std::int32_t>& ks,
    const std::vector<AttributeTable>& attrs = {});

}  // namespace advdrop
