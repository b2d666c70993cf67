// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rpdnn::nn {

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Central differences (f(theta+h) - f(theta-h)) / 2h at each coordinate in
/// `indices` (all coordinates when empty). `f` must read `theta` in place;
/// each coordinate is restored before moving on.
GradCheckResult grad_check(const std::function<double()>& f, std::span<double> theta,
                           std::span<const double> analytic, double h = 1e-5,
                           std::span<const std::size_t> indices = {});

/// Directional form: for each of `directions` seeded random unit vectors v,
/// compares analytic . v with (f(theta + h v) - f(theta - h v)) / 2h.
/// Every coordinate contributes to every comparison, so large tensors are
/// covered without per-coordinate evaluations near the rounding floor.
GradCheckResult directional_check(const std::function<double()>& f, std::span<double> theta,
                                  std::span<const double> analytic, std::size_t directions,
                                  unsigned long long seed, double h = 1e-5);

/// Up to `count` distinct coordinates of [0, n), deterministic in `seed`.
/// Returns all of them when n <= count.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, unsigned long long seed);

}  // namespace rpdnn::nn
