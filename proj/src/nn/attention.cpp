// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/attention.hpp"

#include <cmath>
#include <limits>

#include "rpdnn/errors.hpp"
#include "rpdnn/nn/kernels.hpp"
#include "rpdnn/nn/optim.hpp"

namespace rpdnn::nn {

Tensor masked_softmax(const Tensor& scores, const Mask& mask) {
  if (scores.rank() != 2 || scores.dim(0) != mask.batch() || scores.dim(1) != mask.time()) {
    throw_shape("masked_softmax", scores.shape_str());
  }
  const std::size_t batch = scores.dim(0), time = scores.dim(1);
  Tensor out({batch, time});
  for (std::size_t b = 0; b < batch; ++b) {
    // Padded steps behave as -inf logits: they never enter the max or the sum.
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < time; ++t) {
      if (mask(b, t)) mx = std::max(mx, scores(b, t));
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
      throw DataError("masked_softmax: row " + std::to_string(b) + " has no valid steps");
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < time; ++t) {
      if (!mask(b, t)) continue;
      out(b, t) = std::exp(scores(b, t) - mx);
      sum += out(b, t);
    }
    for (std::size_t t = 0; t < time; ++t) {
      if (mask(b, t)) out(b, t) /= sum;
    }
  }
  check_finite(out, "masked_softmax");
  return out;
}

Tensor masked_softmax_backward(const Tensor& probs, const Tensor& d_probs, const Mask& mask) {
  const std::size_t batch = probs.dim(0), time = probs.dim(1);
  Tensor out({batch, time});
  for (std::size_t b = 0; b < batch; ++b) {
    double inner = 0.0;
    for (std::size_t t = 0; t < time; ++t) {
      if (mask(b, t)) inner += probs(b, t) * d_probs(b, t);
    }
    for (std::size_t t = 0; t < time; ++t) {
      if (mask(b, t)) out(b, t) = probs(b, t) * (d_probs(b, t) - inner);
    }
  }
  return out;
}

Tensor attention_scores(const Tensor& hidden, const AttentionParams& p, const Mask& mask,
                        AttentionCache* cache) {
  if (hidden.rank() != 3 || hidden.dim(2) != p.dim() || hidden.dim(0) != mask.batch() ||
      hidden.dim(1) != mask.time()) {
    throw_shape("attention_scores", hidden.shape_str() + " vs dim " + std::to_string(p.dim()));
  }
  const std::size_t batch = hidden.dim(0), time = hidden.dim(1), dim = hidden.dim(2);
  const auto& k = kernels::active();
  Tensor scores({batch, time});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < time; ++t) {
      if (!mask(b, t)) continue;
      scores(b, t) = std::tanh(k.dot(p.w.data(), hidden.row(b, t).data(), dim) + p.b[0]);
    }
  }
  Tensor weights = masked_softmax(scores, mask);
  if (cache) {
    cache->scores = scores;
    cache->weights = weights;
  }
  return weights;
}

Tensor attention_scores_backward(const Tensor& hidden, const AttentionParams& p,
                                 const Mask& mask, const AttentionCache& cache,
                                 const Tensor& d_weights, AttentionParams& grad) {
  const std::size_t batch = hidden.dim(0), time = hidden.dim(1), dim = hidden.dim(2);
  const Tensor d_scores = masked_softmax_backward(cache.weights, d_weights, mask);
  const auto& k = kernels::active();
  Tensor d_hidden({batch, time, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < time; ++t) {
      if (!mask(b, t)) continue;
      const double s = cache.scores(b, t);
      const double d_pre = d_scores(b, t) * (1.0 - s * s);
      if (d_pre == 0.0) continue;
      k.axpy(d_pre, hidden.row(b, t).data(), grad.w.data(), dim);
      grad.b[0] += d_pre;
      k.axpy(d_pre, p.w.data(), d_hidden.row(b, t).data(), dim);
    }
  }
  return d_hidden;
}

Tensor reweight(const Tensor& hidden, const Tensor& weights) {
  if (hidden.rank() != 3 || weights.rank() != 2 || weights.dim(0) != hidden.dim(0) ||
      weights.dim(1) != hidden.dim(1)) {
    throw_shape("reweight", hidden.shape_str() + " vs " + weights.shape_str());
  }
  Tensor out(hidden.shape());
  for (std::size_t b = 0; b < hidden.dim(0); ++b) {
    for (std::size_t t = 0; t < hidden.dim(1); ++t) {
      const double a = weights(b, t);
      auto src = hidden.row(b, t);
      auto dst = out.row(b, t);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] = a * src[j];
    }
  }
  return out;
}

void reweight_backward(const Tensor& hidden, const Tensor& weights, const Tensor& d_out,
                       Tensor& d_hidden, Tensor& d_weights) {
  const auto& k = kernels::active();
  d_hidden = Tensor(hidden.shape());
  d_weights = Tensor(weights.shape());
  for (std::size_t b = 0; b < hidden.dim(0); ++b) {
    for (std::size_t t = 0; t < hidden.dim(1); ++t) {
      auto g = d_out.row(b, t);
      d_weights(b, t) = k.dot(g.data(), hidden.row(b, t).data(), g.size());
      auto dh = d_hidden.row(b, t);
      const double a = weights(b, t);
      for (std::size_t j = 0; j < g.size(); ++j) dh[j] = a * g[j];
    }
  }
}

Tensor weighted_sum(const Tensor& reweighted) {
  if (reweighted.rank() != 3) throw_shape("weighted_sum", reweighted.shape_str());
  const std::size_t batch = reweighted.dim(0), time = reweighted.dim(1), dim = reweighted.dim(2);
  Tensor out({batch, dim});
  // Time-ordered scalar accumulation: appending zero steps leaves every bit unchanged.
  for (std::size_t b = 0; b < batch; ++b) {
    auto dst = out.row(b);
    for (std::size_t t = 0; t < time; ++t) {
      auto src = reweighted.row(b, t);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
  }
  return out;
}

Tensor weighted_sum_backward(const Tensor& d_sum, std::size_t time) {
  const std::size_t batch = d_sum.dim(0), dim = d_sum.dim(1);
  Tensor out({batch, time, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < time; ++t) {
      std::copy(d_sum.row(b).begin(), d_sum.row(b).end(), out.row(b, t).begin());
    }
  }
  return out;
}

Attention::Attention(std::string name, std::size_t dim)
    : name_(std::move(name)), params_(dim), grad_(dim) {}

void Attention::init(Rng& rng) {
  params_.w = he_init(params_.w.shape(), params_.dim(), rng);
  params_.b.fill(0.0);
}

Tensor Attention::forward(const Tensor& hidden, const Mask& mask) {
  hidden_ = hidden;
  mask_ = mask;
  attention_scores(hidden, params_, mask, &cache_);
  Tensor out = reweight(hidden, cache_.weights);
  check_finite(out, name_);
  return out;
}

Tensor Attention::backward(const Tensor& d_reweighted) {
  Tensor d_hidden, d_weights;
  reweight_backward(hidden_, cache_.weights, d_reweighted, d_hidden, d_weights);
  Tensor d_from_scores =
      attention_scores_backward(hidden_, params_, mask_, cache_, d_weights, grad_);
  kernels::active().axpy(1.0, d_from_scores.data(), d_hidden.data(), d_hidden.size());
  return d_hidden;
}

std::vector<ParamRef> Attention::parameters() {
  return {{name_ + ".w", &params_.w, &grad_.w}, {name_ + ".b", &params_.b, &grad_.b}};
}

void Attention::zero_grad() {
  grad_.w.fill(0.0);
  grad_.b.fill(0.0);
}

}  // namespace rpdnn::nn
