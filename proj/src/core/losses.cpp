#include "core/losses.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>

namespace advdrop {

BprResult bpr_loss(const Eigen::Ref<const Vec>& scores_pos,
                   const Eigen::Ref<const Vec>& scores_neg) {
  if (scores_pos.size() != scores_neg.size()) {
    throw std::invalid_argument("BPR score vectors differ in length");
  }
  BprResult r;
  r.grad_pos.resize(scores_pos.size());
  r.grad_neg.resize(scores_pos.size());
  for (Eigen::Index k = 0; k < scores_pos.size(); ++k) {
    const double diff = scores_pos[k] - scores_neg[k];
    r.loss += softplus(-diff);
    const double g = -sigmoid(-diff);  // d loss / d diff
    r.grad_pos[k] = g;
    r.grad_neg[k] = -g;
  }
  return r;
}

ContrastBatch sample_contrast_batch(std::int32_t n_users,
                                    std::int32_t n_items,
                                    std::int32_t max_samples, double tau,
                                    Rng& rng) {
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  auto sample = [&rng](std::int32_t n, std::int32_t k) {
    std::vector<std::int32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates; only the first k entries are needed
    for (std::int32_t j = 0; j < k; ++j) {
      const auto pick =
          j + static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n - j));
      std::swap(idx[j], idx[pick]);
    }
    idx.resize(k);
    return idx;
  };
  ContrastBatch b;
  b.tau = tau;
  b.users = sample(n_users, std::min(max_samples, n_users));
  b.items = sample(n_items, std::min(max_samples, n_items));
  return b;
}

namespace {

std::atomic<bool> warned_zero_vector{false};

void warn_zero_vector() {
  if (!warned_zero_vector.exchange(true)) {
    std::fprintf(stderr,
                 "warning: zero-norm representation in InfoNCE; "
                 "cosine treated as 0\n");
  }
}

constexpr double kNormFloor = 1e-300;

// One side of the loss (users or items). offset maps side-local indices
// to node rows.
void infonce_side(const Mat& rep_plus, const Mat& rep_minus,
                  const std::vector<std::int32_t>& members,
                  std::int32_t offset, double tau, bool want_grad,
                  double* loss_out, Mat* grad_plus, Mat* grad_minus) {
  const std::size_t m = members.size();
  if (m == 0) return;

  std::vector<double> norm_plus(m), norm_minus(m);
  for (std::size_t a = 0; a < m; ++a) {
    norm_plus[a] = rep_plus.row(offset + members[a]).norm();
    norm_minus[a] = rep_minus.row(offset + members[a]).norm();
  }

  Mat sims(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto x = rep_plus.row(offset + members[a]);
    for (std::size_t j = 0; j < m; ++j) {
      const auto y = rep_minus.row(offset + members[j]);
      const double denom = norm_plus[a] * norm_minus[j];
      if (denom < kNormFloor) {
        warn_zero_vector();
        sims(a, j) = 0.0;
      } else {
        sims(a, j) = x.dot(y) / denom;
      }
    }
  }

  for (std::size_t a = 0; a < m; ++a) {
    // stable log-softmax over candidates j with logits sims/tau
    const double mx = sims.row(a).maxCoeff() / tau;
    double lse = 0.0;
    for (std::size_t j = 0; j < m; ++j) lse += std::exp(sims(a, j) / tau - mx);
    lse = std::log(lse) + mx;
    *loss_out += lse - sims(a, a) / tau;
    if (!want_grad) continue;

    const auto x = rep_plus.row(offset + members[a]);
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp(sims(a, j) / tau - lse);
      const double dl_dsim = (p - (j == a ? 1.0 : 0.0)) / tau;
      if (dl_dsim == 0.0) continue;
      const auto y = rep_minus.row(offset + members[j]);
      const double denom = norm_plus[a] * norm_minus[j];
      if (denom < kNormFloor) continue;  // sim was clamped to 0
      const double s = sims(a, j);
      grad_plus->row(offset + members[a]) +=
          dl_dsim *
          (y / denom - s * x / (norm_plus[a] * norm_plus[a]));
      grad_minus->row(offset + members[j]) +=
          dl_dsim *
          (x / denom - s * y / (norm_minus[j] * norm_minus[j]));
    }
  }
}

}  // namespace

InfoNceResult infonce_loss(const Mat& rep_plus, const Mat& rep_minus,
                           const ContrastBatch& batch, std::int32_t n_users,
                           bool want_grad) {
  if (rep_plus.rows() != rep_minus.rows() ||
      rep_plus.cols() != rep_minus.cols()) {
    throw std::invalid_argument("view representation shapes differ");
  }
  if (batch.tau <= 0.0) throw std::invalid_argument("tau must be positive");
  InfoNceResult r;
  if (want_grad) {
    r.grad_plus = Mat::Zero(rep_plus.rows(), rep_plus.cols());
    r.grad_minus = Mat::Zero(rep_plus.rows(), rep_plus.cols());
  }
  infonce_side(rep_plus, rep_minus, batch.users, 0, batch.tau, want_grad,
               &r.loss_users, &r.grad_plus, &r.grad_minus);
  infonce_side(rep_plus, rep_minus, batch.items, n_users, batch.tau,
               want_grad, &r.loss_items, &r.grad_plus, &r.grad_minus);
  return r;
}

}  // namespace advdrop
