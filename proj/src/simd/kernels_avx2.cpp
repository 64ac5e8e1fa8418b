// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <cmath>

#include "geoscatt/simd/kernels.hpp"

namespace geoscatt::simd {
namespace {

double dot_avx2(const double *a, const double *b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) {
    s += a[i] * b[i];
  }
  return s;
}

void axpy_avx2(double alpha, const double *x, double *y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

// Two interleaved complex values per register: [re0 im0 re1 im1].
void cmul_avx2(std::complex<double> *a, const std::complex<double> *b,
               std::size_t n) {
  auto *pa = reinterpret_cast<double *>(a);
  const auto *pb = reinterpret_cast<const double *>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(vb);         // br br
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);    // bi bi
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);    // ai ar
    // [ar*br - ai*bi, ai*br + ar*bi]
    const __m256d res =
        _mm256_fmaddsub_pd(va, b_re, _mm256_mul_pd(a_sw, b_im));
    _mm256_storeu_pd(pa + 2 * i, res);
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    a[i] = { ar * br - ai * bi, ar * bi + ai * br };
  }
}

void cabs_avx2(const std::complex<double> *a, double *out, std::size_t n) {
  const auto *pa = reinterpret_cast<const double *>(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(pa + 2 * i);      // r0 i0 r1 i1
    const __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);  // r2 i2 r3 i3
    const __m256d sq0 = _mm256_mul_pd(v0, v0);
    const __m256d sq1 = _mm256_mul_pd(v1, v1);
    // hadd -> [s0 s2 s1 s3]; restore order with a lane permute.
    const __m256d sums = _mm256_hadd_pd(sq0, sq1);
    const __m256d ordered = _mm256_permute4x64_pd(sums, 0xD8);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(ordered));
  }
  for (; i < n; ++i) {
    const double re = a[i].real(), im = a[i].imag();
    out[i] = std::sqrt(re * re + im * im);
  }
}

void relu_avx2(double *x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max(x, 0) keeps -0.0 -> 0.0 consistent with the scalar path.
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) {
    x[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

// Four outputs per pass share the loads of a's row.
void gemm_nt_avx2(const double *a, const double *b, double *c, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double *ai = a + i * k;
    double *ci = c + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double *b0 = b + j * k, *b1 = b0 + k, *b2 = b1 + k, *b3 = b2 + k;
      __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
      __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d va = _mm256_loadu_pd(ai + p);
        acc0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + p), acc0);
        acc1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + p), acc1);
        acc2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + p), acc2);
        acc3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + p), acc3);
      }
      // [acc0 acc1 acc2 acc3] horizontal sums in order.
      const __m256d h01 = _mm256_hadd_pd(acc0, acc1);
      const __m256d h23 = _mm256_hadd_pd(acc2, acc3);
      const __m256d sum = _mm256_add_pd(_mm256_permute2f128_pd(h01, h23, 0x20),
                                        _mm256_permute2f128_pd(h01, h23, 0x31));
      alignas(32) double out[4];
      _mm256_store_pd(out, sum);
      for (; p < k; ++p) {
        out[0] += ai[p] * b0[p];
        out[1] += ai[p] * b1[p];
        out[2] += ai[p] * b2[p];
        out[3] += ai[p] * b3[p];
      }
      ci[j] = out[0];
      ci[j + 1] = out[1];
      ci[j + 2] = out[2];
      ci[j + 3] = out[3];
    }
    for (; j < n; ++j) {
      ci[j] = dot_avx2(ai, b + j * k, k);
    }
  }
}

}  // namespace

const KernelTable *avx2_kernels() noexcept {
  static const KernelTable table {
    Backend::kAvx2, dot_avx2, axpy_avx2, cmul_avx2, cabs_avx2, relu_avx2,
    gemm_nt_avx2,
  };
  return &table;
}

}  // namespace geoscatt::simd
