// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/lstm.hpp"

#include <cmath>

#include "rpdnn/errors.hpp"
#include "rpdnn/nn/kernels.hpp"
#include "rpdnn/nn/optim.hpp"

namespace rpdnn::nn {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LstmParams::LstmParams(std::size_t input_dim, std::size_t hidden_dim)
    : w({4 * hidden_dim, input_dim}), u({4 * hidden_dim, hidden_dim}), b({4 * hidden_dim}) {}

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmParams& p, LstmCellCache* cache) {
  const std::size_t d = p.input_dim();
  const std::size_t h = p.hidden_dim();
  if (x.size() != d || h_prev.size() != h || c_prev.size() != h || p.b.size() != 4 * h) {
    throw_shape("lstm_cell", "x/h/c sizes do not match the parameters");
  }
  const auto& k = kernels::active();
  std::vector<double> z(p.b.values().begin(), p.b.values().end());
  k.gemv(p.w.data(), x.data(), z.data(), 4 * h, d);
  k.gemv(p.u.data(), h_prev.data(), z.data(), 4 * h, h);

  LstmState out{std::vector<double>(h), std::vector<double>(h)};
  std::vector<double> tanh_c(h);
  for (std::size_t j = 0; j < h; ++j) {
    z[j] = sigmoid(z[j]);                  // i
    z[h + j] = sigmoid(z[h + j]);          // f
    z[2 * h + j] = std::tanh(z[2 * h + j]);  // g
    z[3 * h + j] = sigmoid(z[3 * h + j]);  // o
    out.c[j] = z[h + j] * c_prev[j] + z[j] * z[2 * h + j];
    tanh_c[j] = std::tanh(out.c[j]);
    out.h[j] = z[3 * h + j] * tanh_c[j];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->c_prev.assign(c_prev.begin(), c_prev.end());
    cache->gates = std::move(z);
    cache->tanh_c = std::move(tanh_c);
  }
  return out;
}

LstmCellGrad lstm_cell_backward(const LstmCellCache& cache, std::span<const double> dh,
                                std::span<const double> dc, const LstmParams& p,
                                LstmParams& grad) {
  const std::size_t d = p.input_dim();
  const std::size_t h = p.hidden_dim();
  if (dh.size() != h || dc.size() != h) throw_shape("lstm_cell_backward", "dh/dc size");
  const auto& g = cache.gates;
  std::vector<double> dz(4 * h);
  LstmCellGrad out{std::vector<double>(d, 0.0), std::vector<double>(h, 0.0),
                   std::vector<double>(h)};
  for (std::size_t j = 0; j < h; ++j) {
    const double i = g[j], f = g[h + j], gg = g[2 * h + j], o = g[3 * h + j];
    const double tc = cache.tanh_c[j];
    const double dct = dc[j] + dh[j] * o * (1.0 - tc * tc);
    dz[j] = dct * gg * i * (1.0 - i);
    dz[h + j] = dct * cache.c_prev[j] * f * (1.0 - f);
    dz[2 * h + j] = dct * i * (1.0 - gg * gg);
    dz[3 * h + j] = dh[j] * tc * o * (1.0 - o);
    out.dc_prev[j] = dct * f;
  }
  const auto& k = kernels::active();
  k.ger(dz.data(), cache.x.data(), grad.w.data(), 4 * h, d);
  k.ger(dz.data(), cache.h_prev.data(), grad.u.data(), 4 * h, h);
  k.axpy(1.0, dz.data(), grad.b.data(), 4 * h);
  k.gemv_t(p.w.data(), dz.data(), out.dx.data(), 4 * h, d);
  k.gemv_t(p.u.data(), dz.data(), out.dh_prev.data(), 4 * h, h);
  return out;
}

StackedLstm::StackedLstm(std::string name, std::size_t input_dim, std::size_t hidden_dim,
                         std::size_t layers)
    : name_(std::move(name)), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (layers == 0 || input_dim == 0 || hidden_dim == 0) {
    throw_shape("StackedLstm", "layers and dims must be positive");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    params_.emplace_back(in, hidden_dim);
    grads_.emplace_back(in, hidden_dim);
  }
}

void StackedLstm::init(Rng& rng) {
  for (auto& p : params_) {
    p.w = he_init(p.w.shape(), p.input_dim(), rng);
    p.u = he_init(p.u.shape(), p.hidden_dim(), rng);
    p.b.fill(0.0);
  }
}

Tensor StackedLstm::forward(const Tensor& x, const Mask& mask) {
  if (x.rank() != 3 || x.dim(2) != input_dim_) {
    throw_shape(name_, "input " + x.shape_str() + " vs input dim " + std::to_string(input_dim_));
  }
  batch_ = x.dim(0);
  time_ = x.dim(1);
  if (mask.batch() != batch_ || mask.time() != time_) throw_shape(name_, "mask vs input");
  mask_ = mask;
  caches_.assign(params_.size(), std::vector<LstmCellCache>(batch_ * time_));

  Tensor in = x;
  for (std::size_t l = 0; l < params_.size(); ++l) {
    Tensor out({batch_, time_, hidden_dim_});
    for (std::size_t b = 0; b < batch_; ++b) {
      std::vector<double> h(hidden_dim_, 0.0), c(hidden_dim_, 0.0);
      for (std::size_t t = 0; t < time_; ++t) {
        if (!mask(b, t)) continue;
        LstmState s = lstm_cell(in.row(b, t), h, c, params_[l], &caches_[l][b * time_ + t]);
        h = std::move(s.h);
        c = std::move(s.c);
        std::copy(h.begin(), h.end(), out.row(b, t).begin());
      }
    }
    check_finite(out, name_ + " layer " + std::to_string(l));
    in = std::move(out);
  }
  return in;
}

Tensor StackedLstm::backward(const Tensor& d_out) {
  if (!d_out.same_shape(Tensor({batch_, time_, hidden_dim_}))) {
    throw_shape(name_ + " backward", d_out.shape_str());
  }
  Tensor d_in = d_out;
  for (std::size_t l = params_.size(); l-- > 0;) {
    const std::size_t in_dim = params_[l].input_dim();
    Tensor d_x({batch_, time_, in_dim});
    for (std::size_t b = 0; b < batch_; ++b) {
      std::vector<double> dh_next(hidden_dim_, 0.0), dc_next(hidden_dim_, 0.0);
      for (std::size_t t = time_; t-- > 0;) {
        if (!mask_(b, t)) continue;  // carried state: gradients pass straight through
        auto dy = d_in.row(b, t);
        for (std::size_t j = 0; j < hidden_dim_; ++j) dh_next[j] += dy[j];
        LstmCellGrad g = lstm_cell_backward(caches_[l][b * time_ + t], dh_next, dc_next,
                                            params_[l], grads_[l]);
        std::copy(g.dx.begin(), g.dx.end(), d_x.row(b, t).begin());
        dh_next = std::move(g.dh_prev);
        dc_next = std::move(g.dc_prev);
      }
    }
    d_in = std::move(d_x);
  }
  return d_in;
}

std::vector<ParamRef> StackedLstm::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t l = 0; l < params_.size(); ++l) {
    const std::string p = name_ + ".l" + std::to_string(l) + ".";
    out.push_back({p + "w", &params_[l].w, &grads_[l].w});
    out.push_back({p + "u", &params_[l].u, &grads_[l].u});
    out.push_back({p + "b", &params_[l].b, &grads_[l].b});
  }
  return out;
}

void StackedLstm::zero_grad() {
  for (auto& g : grads_) {
    g.w.fill(0.0);
    g.u.fill(0.0);
    g.b.fill(0.0);
  }
}

}  // namespace rpdnn::nn
