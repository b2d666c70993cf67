#include <cmath>

#include "doctest.h"
#include "rpdnn/errors.hpp"
#include "rpdnn/nn/attention.hpp"
#include "rpdnn/nn/gradcheck.hpp"

using namespace rpdnn;
using namespace rpdnn::nn;

namespace {

// Independent oracle: plain exp/normalize over the valid prefix.
std::vector<double> softmax_oracle(std::span<const double> s, std::size_t len) {
  std::vector<double> out(s.size(), 0.0);
  long double z = 0;
  for (std::size_t t = 0; t < len; ++t) z += std::exp(static_cast<long double>(s[t]));
  for (std::size_t t = 0; t < len; ++t) {
    out[t] = static_cast<double>(std::exp(static_cast<long double>(s[t])) / z);
  }
  return out;
}

}  // namespace

TEST_CASE("masked softmax: sums, zeros and oracle agreement") {
  Rng rng(1);
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const std::size_t time = 1 + trial % 9;
    const std::size_t len = 1 + rng.next() % time;
    Tensor s({1, time});
    for (auto& v : s.values()) v = rng.normal(0.0, 3.0);
    const std::size_t lens[] = {len};
    const Tensor p = masked_softmax(s, Mask::from_lengths(lens, time));
    double sum = 0.0;
    const auto oracle = softmax_oracle(s.values(), len);
    for (std::size_t t = 0; t < time; ++t) {
      if (t >= len) {
        CHECK(p[t] == 0.0);
      } else {
        sum += p[t];
        CHECK(p[t] == doctest::Approx(oracle[t]).epsilon(1e-13));
      }
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("masked softmax: large scores stay finite; empty rows fail") {
  const Tensor s = Tensor::from({1, 3}, {1000.0, 999.0, -1e6});
  const std::size_t lens[] = {3};
  const Tensor p = masked_softmax(s, Mask::from_lengths(lens, 3));
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(std::isfinite(p[2]));
  CHECK_THROWS_AS(masked_softmax(Tensor({1, 2}), Mask(1, 2, false)), DataError);
}

TEST_CASE("padded score values never matter") {
  Tensor a = Tensor::from({1, 4}, {0.2, -0.1, 5.0, 7.0});
  Tensor b = Tensor::from({1, 4}, {0.2, -0.1, -3e300, 1e300});
  const std::size_t lens[] = {2};
  const Mask m = Mask::from_lengths(lens, 4);
  CHECK(masked_softmax(a, m) == masked_softmax(b, m));
}

TEST_CASE("uniform weights when all scores are equal") {
  AttentionParams p(3);  // zero weights -> every score tanh(0) = 0
  Tensor h({1, 5, 3}, 1.0);
  const std::size_t lens[] = {4};
  const Tensor w = attention_scores(h, p, Mask::from_lengths(lens, 5));
  for (std::size_t t = 0; t < 4; ++t) CHECK(w[t] == doctest::Approx(0.25));
  CHECK(w[4] == 0.0);
}

TEST_CASE("reweight and weighted sum") {
  const Tensor h = Tensor::from({1, 2, 2}, {1, 2, 3, 4});
  const Tensor w = Tensor::from({1, 2}, {0.25, 0.75});
  const Tensor r = reweight(h, w);
  CHECK(r == Tensor::from({1, 2, 2}, {0.25, 0.5, 2.25, 3.0}));
  CHECK(weighted_sum(r) == Tensor::from({1, 2}, {2.5, 3.5}));
}

TEST_CASE("attention layer: gradient check w.r.t. w, b and H") {
  Rng rng(5);
  Attention att("a", 4);
  att.init(rng);
  att.params().b[0] = 0.2;
  Tensor h({2, 3, 4}), r({2, 3, 4});
  for (auto& v : h.values()) v = rng.normal(0.0, 1.0);
  for (auto& v : r.values()) v = rng.normal(0.0, 1.0);
  const std::size_t lens[] = {3, 2};
  const Mask m = Mask::from_lengths(lens, 3);
  auto f = [&] {
    const Tensor out = att.forward(h, m);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * r[i];
    return s;
  };
  att.forward(h, m);
  att.zero_grad();
  const Tensor dh = att.backward(r);
  for (auto& p : att.parameters()) {
    const Tensor g = *p.grad;
    CHECK_MESSAGE(grad_check(f, p.value->values(), g.values()).max_rel_error < 1e-4, p.name);
  }
  CHECK(grad_check(f, h.values(), dh.values()).max_rel_error < 1e-4);
}

TEST_CASE("masked softmax backward against finite differences") {
  Rng rng(8);
  Tensor s({2, 5}), r({2, 5});
  for (auto& v : s.values()) v = rng.normal(0.0, 1.0);
  for (auto& v : r.values()) v = rng.normal(0.0, 1.0);
  const std::size_t lens[] = {5, 3};
  const Mask m = Mask::from_lengths(lens, 5);
  auto f = [&] {
    const Tensor p = masked_softmax(s, m);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * r[i];
    return acc;
  };
  const Tensor ds = masked_softmax_backward(masked_softmax(s, m), r, m);
  CHECK(grad_check(f, s.values(), ds.values()).max_rel_error < 1e-4);
  CHECK(ds(1, 3) == 0.0);
  CHECK(ds(1, 4) == 0.0);
}
