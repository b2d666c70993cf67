// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/gradsuite.hpp"

#include <algorithm>
#include <functional>

#include "rpdnn/model.hpp"
#include "rpdnn/nn/attention.hpp"
#include "rpdnn/nn/gradcheck.hpp"
#include "rpdnn/nn/layers.hpp"
#include "rpdnn/nn/lstm.hpp"

namespace rpdnn {
namespace {

using nn::Mask;
using nn::Tensor;

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.normal(0.0, scale);
  return t;
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Accum {
  GradCase c;
  double h = 1e-5;
  void add(const nn::GradCheckResult& r, const std::string& tensor) {
    if (c.checked == 0 || r.max_rel_error > c.max_rel_error) {
      c.max_rel_error = r.max_rel_error;
      c.worst_tensor = tensor;
      c.worst_analytic = r.worst_analytic;
      c.worst_numeric = r.worst_numeric;
    }
    c.checked += r.checked;
  }
  // Checks every coordinate of `theta` against `analytic`.
  void check_directions(const std::function<double()>& f, Tensor& theta, const Tensor& analytic,
                        const std::string& tensor, std::size_t directions,
                        unsigned long long seed) {
    add(nn::directional_check(f, theta.values(), analytic.values(), directions, seed, h), tensor);
  }
  void check(const std::function<double()>& f, Tensor& theta, const Tensor& analytic,
             const std::string& tensor = "input") {
    add(nn::grad_check(f, theta.values(), analytic.values(), h), tensor);
  }
};

GradCase lstm_cell_case(Rng& rng) {
  Accum acc{{"lstm_cell"}};
  const std::size_t d = 3, h = 4;
  nn::LstmParams p(d, h);
  p.w = random_tensor({4 * h, d}, rng, 0.5);
  p.u = random_tensor({4 * h, h}, rng, 0.5);
  p.b = random_tensor({4 * h}, rng, 0.5);
  Tensor x = random_tensor({d}, rng), hp = random_tensor({h}, rng), cp = random_tensor({h}, rng);
  const Tensor rh = random_tensor({h}, rng), rc = random_tensor({h}, rng);
  auto f = [&] {
    const auto s = nn::lstm_cell(x.values(), hp.values(), cp.values(), p);
    double v = 0.0;
    for (std::size_t i = 0; i < h; ++i) v += rh[i] * s.h[i] + rc[i] * s.c[i];
    return v;
  };
  nn::LstmCellCache cache;
  nn::lstm_cell(x.values(), hp.values(), cp.values(), p, &cache);
  nn::LstmParams g(d, h);
  const auto cg = nn::lstm_cell_backward(cache, rh.values(), rc.values(), p, g);
  acc.check(f, p.w, g.w);
  acc.check(f, p.u, g.u);
  acc.check(f, p.b, g.b);
  acc.check(f, x, Tensor::from({d}, cg.dx));
  acc.check(f, hp, Tensor::from({h}, cg.dh_prev));
  acc.check(f, cp, Tensor::from({h}, cg.dc_prev));
  return acc.c;
}

GradCase stacked_lstm_case(Rng& rng) {
  Accum acc{{"stacked_lstm"}};
  const std::size_t b = 2, t = 4, d = 3, h = 5;
  nn::StackedLstm lstm("lstm", d, h, 2);
  lstm.init(rng);
  const std::size_t lengths[] = {4, 2};
  const Mask mask = Mask::from_lengths(lengths, t);
  Tensor x = random_tensor({b, t, d}, rng);
  const Tensor r = random_tensor({b, t, h}, rng);
  auto f = [&] { return dot(lstm.forward(x, mask), r); };
  lstm.forward(x, mask);
  lstm.zero_grad();
  const Tensor dx = lstm.backward(r);
  for (auto& p : lstm.parameters()) {
    const Tensor analytic = *p.grad;
    acc.check(f, *p.value, analytic, p.name);
  }
  acc.check(f, x, dx);
  return acc.c;
}

GradCase attention_scores_case(Rng& rng) {
  Accum acc{{"attention_scores"}};
  const std::size_t b = 2, t = 4, d = 3;
  const std::size_t lengths[] = {4, 3};
  const Mask mask = Mask::from_lengths(lengths, t);
  nn::AttentionParams p(d);
  p.w = random_tensor({1, d}, rng, 0.7);
  p.b = random_tensor({1}, rng, 0.3);
  Tensor hidden = random_tensor({b, t, d}, rng);
  const Tensor r = random_tensor({b, t}, rng);
  auto f = [&] { return dot(nn::attention_scores(hidden, p, mask), r); };
  nn::AttentionCache cache;
  nn::attention_scores(hidden, p, mask, &cache);
  nn::AttentionParams g(d);
  const Tensor dh = nn::attention_scores_backward(hidden, p, mask, cache, r, g);
  acc.check(f, p.w, g.w);
  acc.check(f, p.b, g.b);
  acc.check(f, hidden, dh);
  return acc.c;
}

GradCase reweight_case(Rng& rng) {
  Accum acc{{"reweight"}};
  Tensor hidden = random_tensor({2, 3, 4}, rng), weights = random_tensor({2, 3}, rng);
  const Tensor r = random_tensor({2, 3, 4}, rng);
  auto f = [&] { return dot(nn::reweight(hidden, weights), r); };
  Tensor dh, dw;
  nn::reweight_backward(hidden, weights, r, dh, dw);
  acc.check(f, hidden, dh);
  acc.check(f, weights, dw);
  return acc.c;
}

GradCase weighted_sum_case(Rng& rng) {
  Accum acc{{"weighted_sum"}};
  Tensor x = random_tensor({2, 3, 4}, rng);
  const Tensor r = random_tensor({2, 4}, rng);
  auto f = [&] { return dot(nn::weighted_sum(x), r); };
  acc.check(f, x, nn::weighted_sum_backward(r, 3));
  return acc.c;
}

GradCase layer_norm_case(Rng& rng) {
  Accum acc{{"layer_norm"}};
  nn::LayerNorm ln("ln", 6);
  ln.gain() = random_tensor({6}, rng);
  ln.bias() = random_tensor({6}, rng);
  Tensor v = random_tensor({2, 6}, rng, 2.0);
  const Tensor r = random_tensor({2, 6}, rng);
  auto f = [&] { return dot(ln.forward(v), r); };
  ln.forward(v);
  ln.zero_grad();
  const Tensor dv = ln.backward(r);
  for (auto& p : ln.parameters()) {
    const Tensor analytic = *p.grad;
    acc.check(f, *p.value, analytic, p.name);
  }
  acc.check(f, v, dv);
  return acc.c;
}

GradCase dense_case(Rng& rng) {
  Accum acc{{"dense_leaky_relu"}};
  nn::Dense dense("fc", 5, 4);
  dense.init(rng);
  dense.bias() = random_tensor({4}, rng, 0.5);
  Tensor x = random_tensor({3, 5}, rng);
  const Tensor r = random_tensor({3, 4}, rng);
  auto f = [&] { return dot(nn::leaky_relu(dense.forward(x)), r); };
  const Tensor z = dense.forward(x);
  dense.zero_grad();
  const Tensor dx = dense.backward(nn::leaky_relu_backward(z, r));
  for (auto& p : dense.parameters()) {
    const Tensor analytic = *p.grad;
    acc.check(f, *p.value, analytic, p.name);
  }
  acc.check(f, x, dx);
  return acc.c;
}

GradCase cross_entropy_case(Rng& rng) {
  Accum acc{{"cross_entropy"}};
  Tensor logits = random_tensor({4, 2}, rng, 2.0);
  const int labels[] = {0, 1, 1, 0};
  auto f = [&] { return nn::cross_entropy(logits, labels).loss; };
  acc.check(f, logits, nn::cross_entropy(logits, labels).grad);
  return acc.c;
}

GradCase masked_softmax_case(Rng& rng) {
  Accum acc{{"masked_softmax"}};
  const std::size_t lengths[] = {4, 1, 3};
  const Mask mask = Mask::from_lengths(lengths, 4);
  Tensor s = random_tensor({3, 4}, rng);
  const Tensor r = random_tensor({3, 4}, rng);
  auto f = [&] { return dot(nn::masked_softmax(s, mask), r); };
  acc.check(f, s, nn::masked_softmax_backward(nn::masked_softmax(s, mask), r, mask));
  return acc.c;
}

EncodedExample toy_example(Rng& rng, std::size_t e, std::size_t t, std::size_t len, int label) {
  EncodedExample ex;
  ex.sc.resize(e);
  for (auto& v : ex.sc) v = rng.normal(0.0, 1.0);
  ex.cc = Tensor({t, e});
  ex.cm = Tensor({t, kMetaDim});
  ex.mask.assign(t, 0);
  for (std::size_t i = 0; i < len; ++i) {
    for (auto& v : ex.cc.row(i)) v = rng.normal(0.0, 1.0);
    for (auto& v : ex.cm.row(i)) v = rng.normal(0.0, 1.0);
    ex.mask[i] = 1;
  }
  ex.label = label;
  ex.thread_id = "toy" + std::to_string(label);
  return ex;
}

// Per-coordinate differences of the assembled model hit the double rounding
// floor (about 3e-11 absolute at h = 1e-5) on coordinates whose gradient is
// near zero, so the model is checked along random directions per tensor.
constexpr std::size_t kModelDirections = 8;

GradCase model_case(Rng& rng, Variant variant) {
  Accum acc{{"model " + std::string(variant_name(variant))}};
  ModelConfig cfg = ModelConfig::desk();
  cfg.embed_dim = 8;
  cfg.context_len = 4;
  cfg.ablation = ablation_for(variant);
  RpdnnModel model(cfg);
  model.init(rng);
  // Non-zero biases and layer-norm offsets so every path is exercised.
  for (auto& p : model.parameters()) {
    if (p.name.ends_with(".b") || p.name.ends_with(".bias")) {
      for (auto& v : p.value->values()) v = rng.normal(0.0, 0.1);
    }
  }
  const std::vector<EncodedExample> batch = {toy_example(rng, 8, 4, 4, 1),
                                             toy_example(rng, 8, 4, 2, 0)};
  auto f = [&] { return model.loss(batch); };
  model.loss_and_grad(batch, false);
  unsigned long long dir_seed = rng.next();
  for (auto& p : model.parameters()) {
    const Tensor analytic = *p.grad;
    acc.check_directions(f, *p.value, analytic, p.name, kModelDirections, dir_seed++);
  }
  return acc.c;
}

}  // namespace

std::vector<GradCase> run_grad_suite(std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<GradCase> out;
  out.push_back(lstm_cell_case(rng));
  out.push_back(stacked_lstm_case(rng));
  out.push_back(attention_scores_case(rng));
  out.push_back(masked_softmax_case(rng));
  out.push_back(reweight_case(rng));
  out.push_back(weighted_sum_case(rng));
  out.push_back(layer_norm_case(rng));
  out.push_back(dense_case(rng));
  out.push_back(cross_entropy_case(rng));
  for (Variant v : kAllVariants) out.push_back(model_case(rng, v));
  for (auto& c : out) c.pass = c.checked > 0 && c.max_rel_error < tol;
  return out;
}

}  // namespace rpdnn
