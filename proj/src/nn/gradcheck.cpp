// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rpdnn/errors.hpp"

namespace rpdnn::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const std::function<double()>& f, std::span<double> theta,
                           std::span<const double> analytic, double h,
                           std::span<const std::size_t> indices) {
  if (analytic.size() != theta.size()) throw_shape("grad_check", "analytic vs theta size");
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(theta.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    indices = all;
  }
  GradCheckResult r;
  for (std::size_t i : indices) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double fp = f();
    theta[i] = saved - h;
    const double fm = f();
    theta[i] = saved;
    const double numeric = (fp - fm) / (2.0 * h);
    const double err = relative_error(analytic[i], numeric);
    ++r.checked;
    if (r.checked == 1 || err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = i;
      r.worst_analytic = analytic[i];
      r.worst_numeric = numeric;
    }
  }
  return r;
}

GradCheckResult directional_check(const std::function<double()>& f, std::span<double> theta,
                                  std::span<const double> analytic, std::size_t directions,
                                  unsigned long long seed, double h) {
  if (analytic.size() != theta.size()) throw_shape("directional_check", "analytic vs theta size");
  const std::vector<double> saved(theta.begin(), theta.end());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(theta.size());
  GradCheckResult r;
  for (std::size_t d = 0; d < directions; ++d) {
    double norm = 0.0;
    for (auto& x : v) {
      x = normal(gen);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] /= norm;
      a += analytic[i] * v[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) theta[i] = saved[i] + h * v[i];
    const double fp = f();
    for (std::size_t i = 0; i < v.size(); ++i) theta[i] = saved[i] - h * v[i];
    const double fm = f();
    std::copy(saved.begin(), saved.end(), theta.begin());
    const double numeric = (fp - fm) / (2.0 * h);
    const double err = relative_error(a, numeric);
    ++r.checked;
    if (r.checked == 1 || err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = d;
      r.worst_analytic = a;
      r.worst_numeric = numeric;
    }
  }
  return r;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count,
                                        unsigned long long seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (n <= count) return all;
  std::mt19937_64 gen(seed);
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace rpdnn::nn
