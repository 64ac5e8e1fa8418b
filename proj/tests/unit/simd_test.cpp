// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "geoscatt/common/rng.hpp"
#include "geoscatt/gnn/gin.hpp"
#include "geoscatt/gst/scatter.hpp"
#include "geoscatt/scatter2d/image.hpp"
#include "geoscatt/scatter2d/morlet.hpp"
#include "geoscatt/simd/kernels.hpp"
#include "support/corpus.hpp"

namespace geoscatt {
namespace {

using simd::Backend;
using Complex = std::complex<double>;

std::vector<double> randoms(std::size_t n, Rng &rng) {
  std::vector<double> v(n);
  for (double &x: v) {
    x = rng.uniform(-2.0, 2.0);
  }
  return v;
}

std::vector<Complex> crandoms(std::size_t n, Rng &rng) {
  std::vector<Complex> v(n);
  for (auto &x: v) {
    x = { rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0) };
  }
  return v;
}

// Restores the startup backend when a test pins one.
class BackendGuard {
 public:
  BackendGuard() : saved_(simd::active_backend()) { }
  ~BackendGuard() { simd::set_backend(saved_); }

 private:
  Backend saved_;
};

TEST(SimdTest, ScalarTableIsScalar) {
  EXPECT_EQ(simd::scalar_kernels().backend, Backend::kScalar);
  EXPECT_TRUE(simd::backend_available(Backend::kScalar));
  BackendGuard guard;
  ASSERT_TRUE(simd::set_backend(Backend::kScalar));
  EXPECT_EQ(simd::active_backend(), Backend::kScalar);
  EXPECT_EQ(simd::backend_name(Backend::kAvx2), "avx2");
}

TEST(SimdTest, KernelsAgreeOnAllTailLengths) {
  const auto *fast = simd::avx2_kernels();
  if (fast == nullptr || !simd::backend_available(Backend::kAvx2)) {
    GTEST_SKIP() << "AVX2 not available";
  }
  const auto &ref = simd::scalar_kernels();
  Rng rng(1);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto a = randoms(n, rng), b = randoms(n, rng);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale += std::abs(a[i] * b[i]);
    }
    EXPECT_NEAR(fast->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
                1e-15 * (scale + 1.0))
        << n;

    auto y1 = b, y2 = b;
    ref.axpy(0.75, a.data(), y1.data(), n);
    fast->axpy(0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(y1[i], y2[i], 1e-15 * 4) << n;
    }

    auto r1 = a, r2 = a;
    ref.relu(r1.data(), n);
    fast->relu(r2.data(), n);
    EXPECT_EQ(r1, r2);

    const auto c = crandoms(n, rng), d = crandoms(n, rng);
    auto c1 = c, c2 = c;
    ref.cmul(c1.data(), d.data(), n);
    fast->cmul(c2.data(), d.data(), n);
    std::vector<double> m1(n), m2(n);
    ref.cabs(c.data(), m1.data(), n);
    fast->cabs(c.data(), m2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(std::abs(c1[i] - c2[i]), 0.0, 1e-14) << n;
      EXPECT_NEAR(m1[i], m2[i], 1e-15 * 4) << n;
    }
  }
}

TEST(SimdTest, GemmAgreesAcrossShapes) {
  const auto *fast = simd::avx2_kernels();
  if (fast == nullptr || !simd::backend_available(Backend::kAvx2)) {
    GTEST_SKIP() << "AVX2 not available";
  }
  const auto &ref = simd::scalar_kernels();
  Rng rng(2);
  for (std::size_t m: { 1, 3, 8 }) {
    for (std::size_t n: { 1, 2, 3, 4, 5, 7, 9, 16 }) {
      for (std::size_t k: { 1, 3, 4, 7, 13, 64 }) {
        const auto a = randoms(m * k, rng), b = randoms(n * k, rng);
        std::vector<double> c1(m * n, 99.0), c2(m * n, -99.0);
        ref.gemm_nt(a.data(), b.data(), c1.data(), m, n, k);
        fast->gemm_nt(a.data(), b.data(), c2.data(), m, n, k);
        for (std::size_t i = 0; i < m * n; ++i) {
          ASSERT_NEAR(c1[i], c2[i], 1e-14 * static_cast<double>(k) * 4)
              << m << "x" << n << "x" << k;
        }
      }
    }
  }
}

// The pipeline stages that sit on the kernels give the same answers under
// either table.
TEST(SimdTest, PipelineAgreesUnderBothBackends) {
  if (!simd::backend_available(Backend::kAvx2)) {
    GTEST_SKIP() << "AVX2 not available";
  }
  BackendGuard guard;
  const auto molecules = testing::corpus_molecules();
  const GinModel gin = gin_init(3);
  const MorletBank bank = morlet_bank(3, 4, 32);

  struct Outputs {
    std::vector<double> ggs, image, emb;
  };
  auto run = [&](Backend b) {
    EXPECT_TRUE(simd::set_backend(b));
    std::vector<Outputs> out;
    for (std::size_t i = 0; i < molecules.size(); i += 7) {
      Outputs o;
      o.ggs = ggs_features(molecules[i]).values;
      o.image = scatter_image(rasterize(molecules[i], 32), bank).values;
      o.emb = gin_forward(molecules[i], gin).embedding;
      out.push_back(std::move(o));
    }
    return out;
  };
  const auto scalar = run(Backend::kScalar);
  const auto fast = run(Backend::kAvx2);
  ASSERT_EQ(scalar.size(), fast.size());
  auto close = [](const std::vector<double> &x, const std::vector<double> &y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(x[i] - y[i]) / std::max(1.0, std::abs(x[i])));
    }
    return worst;
  };
  for (std::size_t m = 0; m < scalar.size(); ++m) {
    EXPECT_LT(close(scalar[m].ggs, fast[m].ggs), 1e-10) << m;
    EXPECT_LT(close(scalar[m].image, fast[m].image), 1e-10) << m;
    EXPECT_LT(close(scalar[m].emb, fast[m].emb), 1e-10) << m;
  }
}

}  // namespace
}  // namespace geoscatt
