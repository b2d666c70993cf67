// SPDX-License-Identifier: Apache-2.0
#pragma once

// Soft attention over time for right-padded sequences:
//   s_t     = tanh(w . h_t + b)          (valid steps only)
//   alpha   = softmax over valid t of s  (padded steps get exactly 0)
//   h'_t    = alpha_t * h_t
//   v       = sum_t h'_t

#include "rpdnn/nn/tensor.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn::nn {

/// scores: B x T. Max-subtracted softmax over each row's valid steps.
/// Throws DataError on a row without valid steps.
Tensor masked_softmax(const Tensor& scores, const Mask& mask);

/// Gradient w.r.t. scores given probabilities and their upstream gradient.
Tensor masked_softmax_backward(const Tensor& probs, const Tensor& d_probs, const Mask& mask);

struct AttentionParams {
  Tensor w;  // 1 x D
  Tensor b;  // 1

  AttentionParams() = default;
  explicit AttentionParams(std::size_t dim) : w({1, dim}), b({1}) {}
  std::size_t dim() const { return w.dim(1); }
};

struct AttentionCache {
  Tensor scores;   // tanh outputs, B x T (0 on padded steps)
  Tensor weights;  // B x T
};

/// H: B x T x D. Returns the B x T attention weights.
Tensor attention_scores(const Tensor& hidden, const AttentionParams& p, const Mask& mask,
                        AttentionCache* cache = nullptr);

/// Accumulates into `grad` and returns dL/dH.
Tensor attention_scores_backward(const Tensor& hidden, const AttentionParams& p,
                                 const Mask& mask, const AttentionCache& cache,
                                 const Tensor& d_weights, AttentionParams& grad);

/// Scales each timestep vector by its weight.
Tensor reweight(const Tensor& hidden, const Tensor& weights);
void reweight_backward(const Tensor& hidden, const Tensor& weights, const Tensor& d_out,
                       Tensor& d_hidden, Tensor& d_weights);

/// Sum over time of already reweighted states: B x T x D -> B x D.
Tensor weighted_sum(const Tensor& reweighted);
Tensor weighted_sum_backward(const Tensor& d_sum, std::size_t time);

/// Learnable attention layer bundling the ops above with their caches.
class Attention {
 public:
  Attention() = default;
  Attention(std::string name, std::size_t dim);

  /// He-normal w (fan-in D), zero bias.
  void init(Rng& rng);

  /// Returns the reweighted sequence; weights() holds alpha afterwards.
  Tensor forward(const Tensor& hidden, const Mask& mask);
  /// Returns dL/dH for the reweighted output gradient.
  Tensor backward(const Tensor& d_reweighted);

  const Tensor& weights() const { return cache_.weights; }
  std::vector<ParamRef> parameters();
  void zero_grad();
  AttentionParams& params() { return params_; }

 private:
  std::string name_;
  AttentionParams params_, grad_;
  AttentionCache cache_;
  Tensor hidden_;
  Mask mask_;
};

}  // namespace rpdnn::nn
