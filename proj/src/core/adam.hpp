#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/common.hpp"

namespace advdrop {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a flat parameter block.
class Adam {
 public:
  explicit Adam(std::size_t n_params, AdamConfig cfg = {})
      : cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {}

  // In-place update; throws numeric_error on non-finite gradients.
  void step(std::span<double> params, std::span<const double> grads);

  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

}  // namespace advdrop
