// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string_view>

#include "geoscatt/simd/kernels.hpp"

namespace geoscatt::simd {

#ifndef GEOSCATT_HAVE_AVX2
const KernelTable *avx2_kernels() noexcept { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(GEOSCATT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable *initial_table() noexcept {
  const char *env = std::getenv("GEOSCATT_SIMD");
  const std::string_view pinned = env != nullptr ? env : "";
  if (pinned == "scalar" || !cpu_has_avx2()) {
    return &scalar_kernels();
  }
  return avx2_kernels();
}

std::atomic<const KernelTable *> &active() noexcept {
  static std::atomic<const KernelTable *> table { initial_table() };
  return table;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  return backend == Backend::kScalar || cpu_has_avx2();
}

const KernelTable &kernels() noexcept {
  return *active().load(std::memory_order_relaxed);
}

Backend active_backend() noexcept { return kernels().backend; }

bool set_backend(Backend backend) noexcept {
  if (!backend_available(backend)) {
    return false;
  }
  active().store(backend == Backend::kAvx2 ? avx2_kernels()
                                           : &scalar_kernels());
  return true;
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace geoscatt::simd
