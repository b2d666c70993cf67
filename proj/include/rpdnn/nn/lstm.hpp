// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rpdnn/nn/tensor.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn::nn {

/// One LSTM layer. Gate blocks are stacked in the order i, f, g, o.
struct LstmParams {
  Tensor w;  // 4H x D
  Tensor u;  // 4H x H
  Tensor b;  // 4H

  LstmParams() = default;
  LstmParams(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return w.dim(1); }
  std::size_t hidden_dim() const { return u.dim(1); }
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// Everything the backward pass of one step needs.
struct LstmCellCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> gates;  // activated i, f, g, o (4H)
  std::vector<double> tanh_c;
};

struct LstmCellGrad {
  std::vector<double> dx, dh_prev, dc_prev;
};

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmParams& p,
                    LstmCellCache* cache = nullptr);

/// Accumulates parameter gradients into `grad`; returns input/state gradients.
LstmCellGrad lstm_cell_backward(const LstmCellCache& cache, std::span<const double> dh,
                                std::span<const double> dc, const LstmParams& p,
                                LstmParams& grad);

/// Forward-only stacked LSTM over right-padded batches. At masked steps the
/// recurrent state is carried through unchanged and the output is zero.
class StackedLstm {
 public:
  StackedLstm() = default;
  /// Every layer has `hidden_dim` units; layer 0 reads `input_dim` features.
  StackedLstm(std::string name, std::size_t input_dim, std::size_t hidden_dim,
              std::size_t layers);

  /// He-normal weights, zero biases.
  void init(Rng& rng);

  /// x: B x T x D. Returns B x T x H and keeps the caches for backward().
  Tensor forward(const Tensor& x, const Mask& mask);
  /// d_out: B x T x H. Returns B x T x D; accumulates into the gradients.
  Tensor backward(const Tensor& d_out);

  std::vector<ParamRef> parameters();
  void zero_grad();

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t num_layers() const { return params_.size(); }
  LstmParams& layer(std::size_t l) { return params_[l]; }
  const LstmParams& layer(std::size_t l) const { return params_[l]; }
  LstmParams& layer_grad(std::size_t l) { return grads_[l]; }

 private:
  std::string name_;
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::vector<LstmParams> params_;
  std::vector<LstmParams> grads_;

  // caches_[layer][b * T + t]; empty vectors at masked steps.
  std::vector<std::vector<LstmCellCache>> caches_;
  Mask mask_;
  std::size_t batch_ = 0, time_ = 0;
};

}  // namespace rpdnn::nn
