// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "rpdnn/nn/tensor.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn::nn {

/// Samples N(0, sqrt(2 / fan_in)).
Tensor he_init(const std::vector<std::size_t>& shape, std::size_t fan_in, Rng& rng);

struct AdaGradConfig {
  double lr = 1e-4;
  double weight_decay = 1e-5;
  double eps = 1e-8;
};

/// AdaGrad with coupled L2 decay:
///   g' = g + wd * theta;  acc += g'^2;  theta -= lr * g' / (sqrt(acc) + eps)
class AdaGrad {
 public:
  explicit AdaGrad(AdaGradConfig cfg = {}) : cfg_(cfg) {}

  /// Parameters must be passed in the same order on every call.
  void step(std::span<const ParamRef> params);

  const AdaGradConfig& config() const { return cfg_; }
  const std::vector<Tensor>& accumulators() const { return acc_; }

 private:
  AdaGradConfig cfg_;
  std::vector<Tensor> acc_;
};

/// Single-tensor form of the update above.
void adagrad_step(Tensor& theta, const Tensor& grad, Tensor& accumulator,
                  const AdaGradConfig& cfg);

}  // namespace rpdnn::nn
