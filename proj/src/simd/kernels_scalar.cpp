// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "geoscatt/simd/kernels.hpp"

namespace geoscatt::simd {
namespace {

double dot_scalar(const double *a, const double *b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i] * b[i];
  }
  return s;
}

void axpy_scalar(double alpha, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

void cmul_scalar(std::complex<double> *a, const std::complex<double> *b,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    a[i] = { ar * br - ai * bi, ar * bi + ai * br };
  }
}

void cabs_scalar(const std::complex<double> *a, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i].real(), im = a[i].imag();
    out[i] = std::sqrt(re * re + im * im);
  }
}

void relu_scalar(double *x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

void gemm_nt_scalar(const double *a, const double *b, double *c, std::size_t m,
                    std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] = dot_scalar(a + i * k, b + j * k, k);
    }
  }
}

}  // namespace

const KernelTable &scalar_kernels() noexcept {
  static const KernelTable table {
    Backend::kScalar, dot_scalar, axpy_scalar, cmul_scalar, cabs_scalar,
    relu_scalar, gemm_nt_scalar,
  };
  return table;
}

}  // namespace geoscatt::simd
