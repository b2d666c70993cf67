// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rpdnn/nn/tensor.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn::nn {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kLeakySlope = 0.01;

// ---- layer normalization over the feature dimension of B x D rows ----

struct LayerNormCache {
  Tensor normalized;  // x-hat
  std::vector<double> inv_std;
};

Tensor layer_norm(const Tensor& v, std::span<const double> gain, std::span<const double> bias,
                  LayerNormCache* cache = nullptr);
/// Accumulates into d_gain/d_bias; returns dL/dv.
Tensor layer_norm_backward(const LayerNormCache& cache, const Tensor& d_out,
                           std::span<const double> gain, std::span<double> d_gain,
                           std::span<double> d_bias);

// ---- affine + leaky ReLU ----

/// x: B x In, w: Out x In, b: Out.
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor affine_backward(const Tensor& x, const Tensor& w, const Tensor& d_out, Tensor& d_w,
                       Tensor& d_b);

Tensor leaky_relu(const Tensor& z, double slope = kLeakySlope);
Tensor leaky_relu_backward(const Tensor& z, const Tensor& d_out, double slope = kLeakySlope);

/// max(z, slope*z) with z = W x + b for a single vector.
std::vector<double> dense_lrelu(std::span<const double> x, const Tensor& w, const Tensor& b,
                                double slope = kLeakySlope);

// ---- dropout ----

/// Inverted dropout. In training, fills `keep_scale` (same shape as x) with
/// 0 or 1/(1-rate). Identity at inference or when rate is 0.
Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng,
               Tensor* keep_scale = nullptr);

// ---- loss ----

Tensor softmax_rows(const Tensor& logits);

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;  // dL/dlogits, (softmax - onehot) / B
};

/// Mean negative log-likelihood of integer class labels.
LossAndGrad cross_entropy(const Tensor& logits, std::span<const int> labels);

// ---- stateful layers used by the model ----

class Dense {
 public:
  Dense() = default;
  Dense(std::string name, std::size_t in, std::size_t out);

  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& d_out);

  std::vector<ParamRef> parameters();
  void zero_grad();
  Tensor& weight() { return w_; }
  Tensor& bias() { return b_; }
  std::size_t in_dim() const { return w_.dim(1); }
  std::size_t out_dim() const { return w_.dim(0); }

 private:
  std::string name_;
  Tensor w_, b_, dw_, db_;
  Tensor x_;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(std::string name, std::size_t dim);

  Tensor forward(const Tensor& v);
  Tensor backward(const Tensor& d_out);

  std::vector<ParamRef> parameters();
  void zero_grad();
  Tensor& gain() { return gain_; }
  Tensor& bias() { return bias_; }

 private:
  std::string name_;
  Tensor gain_, bias_, d_gain_, d_bias_;
  LayerNormCache cache_;
};

}  // namespace rpdnn::nn
