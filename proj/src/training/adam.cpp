#include "gcs/error.hpp"
#include "gcs/training.hpp"

#include <cmath>

namespace gcs {

Adam::Adam(std::size_t n_params, double learning_rate, AdamConfig cfg)
    : lr_(learning_rate), cfg_(cfg), m_(n_params, 0.0), v_(n_params, 0.0) {
  if (learning_rate < 0.0) throw ParameterError("learning rate must be non-negative");
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("Adam: parameter/gradient size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.epsilon);
  }
}

}  // namespace gcs
