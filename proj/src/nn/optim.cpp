// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/optim.hpp"

#include <cmath>

#include "rpdnn/errors.hpp"

namespace rpdnn::nn {

Tensor he_init(const std::vector<std::size_t>& shape, std::size_t fan_in, Rng& rng) {
  if (fan_in == 0) throw_shape("he_init", "fan_in must be positive");
  Tensor t(shape);
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (auto& v : t.values()) v = rng.normal(0.0, stddev);
  return t;
}

void adagrad_step(Tensor& theta, const Tensor& grad, Tensor& accumulator,
                  const AdaGradConfig& cfg) {
  if (!theta.same_shape(grad) || !theta.same_shape(accumulator)) {
    throw_shape("adagrad_step", theta.shape_str());
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i] + cfg.weight_decay * theta[i];
    accumulator[i] += g * g;
    theta[i] -= cfg.lr * g / (std::sqrt(accumulator[i]) + cfg.eps);
  }
}

void AdaGrad::step(std::span<const ParamRef> params) {
  if (acc_.empty()) {
    for (const auto& p : params) acc_.emplace_back(p.value->shape());
  }
  if (acc_.size() != params.size()) throw_shape("AdaGrad::step", "parameter count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    adagrad_step(*params[i].value, *params[i].grad, acc_[i], cfg_);
  }
}

}  // namespace rpdnn::nn
