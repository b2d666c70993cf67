// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/layers.hpp"

#include <cmath>

#include "rpdnn/errors.hpp"
#include "rpdnn/nn/kernels.hpp"
#include "rpdnn/nn/optim.hpp"

namespace rpdnn::nn {

Tensor layer_norm(const Tensor& v, std::span<const double> gain, std::span<const double> bias,
                  LayerNormCache* cache) {
  if (v.rank() != 2 || gain.size() != v.dim(1) || bias.size() != v.dim(1)) {
    throw_shape("layer_norm", v.shape_str());
  }
  const std::size_t rows = v.dim(0), dim = v.dim(1);
  Tensor xhat({rows, dim});
  Tensor out({rows, dim});
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = v.row(r);
    double mean = 0.0;
    for (double a : x) mean += a;
    mean /= static_cast<double>(dim);
    double var = 0.0;
    for (double a : x) var += (a - mean) * (a - mean);
    var /= static_cast<double>(dim);
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t j = 0; j < dim; ++j) {
      xhat(r, j) = (x[j] - mean) * inv_std[r];
      out(r, j) = gain[j] * xhat(r, j) + bias[j];
    }
  }
  check_finite(out, "layer_norm");
  if (cache) {
    cache->normalized = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

Tensor layer_norm_backward(const LayerNormCache& cache, const Tensor& d_out,
                           std::span<const double> gain, std::span<double> d_gain,
                           std::span<double> d_bias) {
  const std::size_t rows = d_out.dim(0), dim = d_out.dim(1);
  Tensor dv({rows, dim});
  std::vector<double> dxhat(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    double mean_d = 0.0, mean_dx = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double g = d_out(r, j);
      const double xh = cache.normalized(r, j);
      d_gain[j] += g * xh;
      d_bias[j] += g;
      dxhat[j] = g * gain[j];
      mean_d += dxhat[j];
      mean_dx += dxhat[j] * xh;
    }
    mean_d /= static_cast<double>(dim);
    mean_dx /= static_cast<double>(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      dv(r, j) = cache.inv_std[r] * (dxhat[j] - mean_d - cache.normalized(r, j) * mean_dx);
    }
  }
  return dv;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 2 || w.rank() != 2 || x.dim(1) != w.dim(1) || b.size() != w.dim(0)) {
    throw_shape("affine", x.shape_str() + " * " + w.shape_str());
  }
  const std::size_t rows = x.dim(0), in = w.dim(1), out_dim = w.dim(0);
  Tensor out({rows, out_dim});
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(b.values().begin(), b.values().end(), out.row(r).begin());
    k.gemv(w.data(), x.row(r).data(), out.row(r).data(), out_dim, in);
  }
  return out;
}

Tensor affine_backward(const Tensor& x, const Tensor& w, const Tensor& d_out, Tensor& d_w,
                       Tensor& d_b) {
  const std::size_t rows = x.dim(0), in = w.dim(1), out_dim = w.dim(0);
  Tensor dx({rows, in});
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < rows; ++r) {
    k.ger(d_out.row(r).data(), x.row(r).data(), d_w.data(), out_dim, in);
    k.axpy(1.0, d_out.row(r).data(), d_b.data(), out_dim);
    k.gemv_t(w.data(), d_out.row(r).data(), dx.row(r).data(), out_dim, in);
  }
  return dx;
}

Tensor leaky_relu(const Tensor& z, double slope) {
  Tensor out(z.shape());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : slope * z[i];
  return out;
}

Tensor leaky_relu_backward(const Tensor& z, const Tensor& d_out, double slope) {
  Tensor out(z.shape());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? d_out[i] : slope * d_out[i];
  return out;
}

std::vector<double> dense_lrelu(std::span<const double> x, const Tensor& w, const Tensor& b,
                                double slope) {
  const Tensor xt = Tensor::from({1, x.size()}, std::vector<double>(x.begin(), x.end()));
  const Tensor y = leaky_relu(affine(xt, w, b), slope);
  return {y.values().begin(), y.values().end()};
}

Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng, Tensor* keep_scale) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) {
    if (keep_scale) *keep_scale = Tensor(x.shape(), 1.0);
    return x;
  }
  const double scale = 1.0 / (1.0 - rate);
  Tensor mask(x.shape());
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng.uniform() < rate ? 0.0 : scale;
    out[i] = x[i] * mask[i];
  }
  if (keep_scale) *keep_scale = std::move(mask);
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.shape());
  for (std::size_t r = 0; r < logits.dim(0); ++r) {
    auto z = logits.row(r);
    double mx = z[0];
    for (double a : z) mx = std::max(mx, a);
    double sum = 0.0;
    auto p = out.row(r);
    for (std::size_t j = 0; j < z.size(); ++j) {
      p[j] = std::exp(z[j] - mx);
      sum += p[j];
    }
    for (auto& a : p) a /= sum;
  }
  return out;
}

LossAndGrad cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size() || labels.empty()) {
    throw_shape("cross_entropy", logits.shape_str());
  }
  const std::size_t rows = logits.dim(0), classes = logits.dim(1);
  LossAndGrad out{0.0, softmax_rows(logits)};
  const double inv_b = 1.0 / static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto y = static_cast<std::size_t>(labels[r]);
    if (y >= classes) throw DataError("cross_entropy: label out of range");
    // log-softmax directly from logits keeps tiny losses accurate.
    auto z = logits.row(r);
    double mx = z[0];
    for (double a : z) mx = std::max(mx, a);
    double sum = 0.0;
    for (double a : z) sum += std::exp(a - mx);
    out.loss += -(z[y] - mx - std::log(sum));
    for (std::size_t j = 0; j < classes; ++j) {
      out.grad(r, j) = (out.grad(r, j) - (j == y ? 1.0 : 0.0)) * inv_b;
    }
  }
  out.loss *= inv_b;
  return out;
}

Dense::Dense(std::string name, std::size_t in, std::size_t out)
    : name_(std::move(name)), w_({out, in}), b_({out}), dw_({out, in}), db_({out}) {}

void Dense::init(Rng& rng) {
  w_ = he_init(w_.shape(), in_dim(), rng);
  b_.fill(0.0);
}

Tensor Dense::forward(const Tensor& x) {
  x_ = x;
  Tensor y = affine(x, w_, b_);
  check_finite(y, name_);
  return y;
}

Tensor Dense::backward(const Tensor& d_out) { return affine_backward(x_, w_, d_out, dw_, db_); }

std::vector<ParamRef> Dense::parameters() {
  return {{name_ + ".w", &w_, &dw_}, {name_ + ".b", &b_, &db_}};
}

void Dense::zero_grad() {
  dw_.fill(0.0);
  db_.fill(0.0);
}

LayerNorm::LayerNorm(std::string name, std::size_t dim)
    : name_(std::move(name)), gain_({dim}, 1.0), bias_({dim}), d_gain_({dim}), d_bias_({dim}) {}

Tensor LayerNorm::forward(const Tensor& v) {
  return layer_norm(v, gain_.values(), bias_.values(), &cache_);
}

Tensor LayerNorm::backward(const Tensor& d_out) {
  return layer_norm_backward(cache_, d_out, gain_.values(), d_gain_.values(), d_bias_.values());
}

std::vector<ParamRef> LayerNorm::parameters() {
  return {{name_ + ".gain", &gain_, &d_gain_}, {name_ + ".bias", &bias_, &d_bias_}};
}

void LayerNorm::zero_grad() {
  d_gain_.fill(0.0);
  d_bias_.fill(0.0);
}

}  // namespace rpdnn::nn
