// SPDX-License-Identifier: Apache-2.0
#pragma once

// Finite-difference checks of every trainable layer and of the assembled
// model at toy sizes. Shared by the CLI and the test binaries.

#include <cstdint>
#include <string>
#include <vector>

namespace rpdnn {

struct GradCase {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  bool pass = false;
  // Location of the largest error.
  std::string worst_tensor;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

inline constexpr double kGradTolerance = 1e-4;

std::vector<GradCase> run_grad_suite(std::uint64_t seed = 1, double tol = kGradTolerance);

}  // namespace rpdnn
