// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Inner-loop kernels shared by every numeric module. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2/FMA variant. The active
// table is chosen once at startup from CPUID and can be pinned with
// GEOSCATT_SIMD=scalar|avx2 or set_backend().

namespace geoscatt::simd {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  Backend backend;
  /// sum_i a[i] * b[i]
  double (*dot)(const double *a, const double *b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  /// a[i] *= b[i] (complex)
  void (*cmul)(std::complex<double> *a, const std::complex<double> *b,
               std::size_t n);
  /// out[i] = |a[i]|
  void (*cabs)(const std::complex<double> *a, double *out, std::size_t n);
  /// x[i] = max(x[i], 0)
  void (*relu)(double *x, std::size_t n);
  /// c (m x n) = a (m x k) * b (n x k)^T, all row-major; c is overwritten.
  void (*gemm_nt)(const double *a, const double *b, double *c, std::size_t m,
                  std::size_t n, std::size_t k);
};

const KernelTable &scalar_kernels() noexcept;
/// nullptr when the variant was not compiled in.
const KernelTable *avx2_kernels() noexcept;

bool backend_available(Backend backend) noexcept;
const KernelTable &kernels() noexcept;
Backend active_backend() noexcept;
/// Returns false (and leaves the table unchanged) if the backend is not
/// available on this machine.
bool set_backend(Backend backend) noexcept;
std::string_view backend_name(Backend backend) noexcept;

inline double dot(const double *a, const double *b, std::size_t n) {
  return kernels().dot(a, b, n);
}
inline void axpy(double alpha, const double *x, double *y, std::size_t n) {
  kernels().axpy(alpha, x, y, n);
}

}  // namespace geoscatt::simd
