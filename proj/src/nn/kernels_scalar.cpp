// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/kernels.hpp"

namespace rpdnn::nn::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, const double* x, double* y, std::size_t rows,
                 std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_scalar(const double* w, const double* g, double* x, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], w + r * cols, x, cols);
  }
}

void ger_scalar(const double* g, const double* x, double* w, std::size_t rows,
                std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], x, w + r * cols, cols);
  }
}

constexpr KernelTable kScalar{"scalar", dot_scalar, axpy_scalar, gemv_scalar, gemv_t_scalar,
                              ger_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace rpdnn::nn::kernels
