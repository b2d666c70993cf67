// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rpdnn/nn/kernels.hpp"

namespace rpdnn::nn::kernels {

#if defined(RPDNN_BUILD_AVX2)
const KernelTable* avx2_table_impl();
const KernelTable* avx2_table() { return avx2_table_impl(); }
#else
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelTable* table_for(Backend b) {
  return b == Backend::avx2 ? avx2_table() : &scalar_table();
}

Backend initial_backend() {
  if (const char* env = std::getenv("RPDNN_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_supports(Backend::avx2)) return Backend::avx2;
  }
  return cpu_supports(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

}  // namespace

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(RPDNN_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (cpu_supports(Backend::avx2)) out.push_back(Backend::avx2);
  return out;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const Backend b = initial_backend();
    const KernelTable* expected = nullptr;
    if (g_active.compare_exchange_strong(expected, table_for(b))) g_backend.store(b);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

Backend active_backend() {
  active();
  return g_backend.load();
}

void select(Backend b) {
  if (!cpu_supports(b)) {
    throw std::invalid_argument("kernel backend " + std::string(backend_name(b)) +
                                " is not supported on this CPU/build");
  }
  g_backend.store(b);
  g_active.store(table_for(b), std::memory_order_release);
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace rpdnn::nn::kernels
