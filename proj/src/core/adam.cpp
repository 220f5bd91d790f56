#include "core/adam.hpp"

#include <cmath>

namespace advdrop {

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam parameter/gradient size mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw numeric_error("non-finite gradient in Adam step " +
                          std::to_string(t_ + 1));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < m_.size(); ++k) {
    const double g = grads[k];
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * g;
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * g * g;
    const double mhat = m_[k] / c1;
    const double vhat = v_[k] / c2;
    params[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

}  // namespace advdrop
