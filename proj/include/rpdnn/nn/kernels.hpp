// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense double-precision inner loops. Every kernel has a scalar reference
// implementation; vector variants are selected once at startup from cpuid
// (override with RPDNN_KERNELS=scalar|avx2) and are tested for agreement
// with the scalar path. Reductions in a vector variant use a different
// summation order, so results agree to rounding, not bit-for-bit.

#include <cstddef>
#include <string_view>
#include <vector>

namespace rpdnn::nn::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  std::string_view name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y += W x, W row-major rows x cols
  void (*gemv)(const double* w, const double* x, double* y, std::size_t rows, std::size_t cols);
  /// x += W^T g
  void (*gemv_t)(const double* w, const double* g, double* x, std::size_t rows, std::size_t cols);
  /// W += g x^T
  void (*ger)(const double* g, const double* x, double* w, std::size_t rows, std::size_t cols);
};

const KernelTable& scalar_table();
/// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Backend b);
std::vector<Backend> available_backends();

/// Table in use. Resolved on first call; thread-safe afterwards.
const KernelTable& active();
Backend active_backend();

/// Switches the process-wide backend. Not safe while kernels are running on
/// other threads. Throws std::invalid_argument when unsupported.
void select(Backend b);

std::string_view backend_name(Backend b);

}  // namespace rpdnn::nn::kernels
