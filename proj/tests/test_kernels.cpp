#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rpdnn/nn/kernels.hpp"

using namespace rpdnn::nn::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

// Summation-order differences only; scaled by the magnitude of the terms.
void check_close(const std::vector<double>& a, const std::vector<double>& b, double scale) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13 * scale);
}

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
  const KernelTable& k = scalar_table();
  const std::vector<double> w = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const std::vector<double> x = {1, -1, 2};
  CHECK(k.dot(x.data(), x.data(), 3) == 6.0);
  std::vector<double> y = {10, 20};
  k.gemv(w.data(), x.data(), y.data(), 2, 3);
  CHECK(y == std::vector<double>{10 + 1 - 2 + 6, 20 + 4 - 5 + 12});
  std::vector<double> xt = {0, 0, 0};
  const std::vector<double> g = {1, 2};
  k.gemv_t(w.data(), g.data(), xt.data(), 2, 3);
  CHECK(xt == std::vector<double>{9, 12, 15});
  std::vector<double> m(6, 0.0);
  k.ger(g.data(), x.data(), m.data(), 2, 3);
  CHECK(m == std::vector<double>{1, -1, 2, 2, -2, 4});
  std::vector<double> acc = {1, 1, 1};
  k.axpy(2.0, x.data(), acc.data(), 3);
  CHECK(acc == std::vector<double>{3, -1, 5});
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const KernelTable* v = avx2_table();
  if (v == nullptr || !cpu_supports(Backend::avx2)) {
    MESSAGE("AVX2 variant unavailable; skipping equivalence");
    return;
  }
  const KernelTable& s = scalar_table();
  std::mt19937_64 gen(42);
  // Sizes straddle the vector width and the unrolled block sizes.
  for (std::size_t rows : {1u, 3u, 4u, 5u, 8u, 13u}) {
    for (std::size_t cols : {1u, 2u, 3u, 4u, 7u, 8u, 9u, 31u, 64u, 65u}) {
      const auto w = random_vec(rows * cols, gen);
      const auto x = random_vec(cols, gen);
      const auto g = random_vec(rows, gen);
      const double scale = static_cast<double>(cols + rows);

      CHECK(std::abs(s.dot(x.data(), x.data(), cols) - v->dot(x.data(), x.data(), cols)) <=
            1e-13 * scale);

      auto y1 = g, y2 = g;
      s.gemv(w.data(), x.data(), y1.data(), rows, cols);
      v->gemv(w.data(), x.data(), y2.data(), rows, cols);
      check_close(y1, y2, scale);

      auto t1 = x, t2 = x;
      s.gemv_t(w.data(), g.data(), t1.data(), rows, cols);
      v->gemv_t(w.data(), g.data(), t2.data(), rows, cols);
      check_close(t1, t2, scale);

      auto m1 = w, m2 = w;
      s.ger(g.data(), x.data(), m1.data(), rows, cols);
      v->ger(g.data(), x.data(), m2.data(), rows, cols);
      check_close(m1, m2, 1.0);

      auto a1 = x, a2 = x;
      s.axpy(0.37, x.data(), a1.data(), cols);
      v->axpy(0.37, x.data(), a2.data(), cols);
      check_close(a1, a2, 1.0);
    }
  }
}

TEST_CASE("backend selection") {
  const auto backends = available_backends();
  REQUIRE_FALSE(backends.empty());
  CHECK(backends.front() == Backend::scalar);
  const Backend before = active_backend();
  select(Backend::scalar);
  CHECK(&active() == &scalar_table());
  CHECK(backend_name(active_backend()) == "scalar");
  if (avx2_table() && cpu_supports(Backend::avx2)) {
    select(Backend::avx2);
    CHECK(active().name == "avx2");
  } else {
    CHECK_THROWS_AS(select(Backend::avx2), std::invalid_argument);
  }
  select(before);
}
