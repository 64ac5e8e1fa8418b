// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "geoscatt/common/error.hpp"
#include "geoscatt/graphcore/graph_matrices.hpp"
#include "geoscatt/gst/filters.hpp"
#include "geoscatt/gst/scatter.hpp"
#include "support/corpus.hpp"
#include "support/random_graphs.hpp"

namespace geoscatt {
namespace {

// Plain triple loop, no kernels.
Matrix naive_matmul(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        s += a(i, k) * b(k, j);
      }
      out(i, j) = s;
    }
  }
  return out;
}

Matrix naive_power(const Matrix &t, int p) {
  Matrix out = Matrix::identity(t.rows());
  for (int i = 0; i < p; ++i) {
    out = naive_matmul(out, t);
  }
  return out;
}

TEST(DiffusionTest, K2FilterVanishes) {
  const auto gm = build_matrices(parse_smiles("CC"));
  const auto bank = diffusion_filters(gm.T, 4);
  ASSERT_EQ(bank.filters.size(), 4);
  EXPECT_EQ(bank.filters[0], Matrix::identity(2) + gm.T);
  for (int j = 1; j < 4; ++j) {
    EXPECT_LT(frobenius_norm(bank.filters[j]), 1e-15);
  }
}

TEST(DiffusionTest, P3MatchesDensePowers) {
  const auto gm = build_matrices(parse_smiles("CCC"));
  const auto bank = diffusion_filters(gm.T, 4);
  for (int j = 1; j < 4; ++j) {
    const int a = 1 << (j - 1);
    const Matrix expected = naive_power(gm.T, a) - naive_power(gm.T, 2 * a);
    EXPECT_LT(max_abs_diff(bank.filters[j], expected), 1e-12) << j;
  }
}

TEST(DiffusionTest, Telescoping) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_molecule(rng, 2 + rng.below(19));
    const auto T = build_matrices(g).T;
    for (int J: { 2, 4, 5 }) {
      const auto bank = diffusion_filters(T, J);
      Matrix sum(T.rows(), T.cols());
      for (int j = 1; j < J; ++j) {
        sum = sum + bank.filters[j];
      }
      const Matrix expected = T - naive_power(T, 1 << (J - 1));
      EXPECT_LT(max_abs_diff(sum, expected), 1e-10);
    }
  }
}

TEST(HannTest, CentersAndErrors) {
  EXPECT_DOUBLE_EQ(hann_center(1, 4, 3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(hann_center(0, 4, 3.0, 2.0), 1.0);
  const auto gm = build_matrices(parse_smiles("CCO"));
  for (double R: { 0.0, -1.0, 5.0, 6.0 }) {
    try {
      hann_filters(gm.V, gm.eigvals, 4, R, HannVariant::kPaperExact);
      FAIL() << R;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidScaleParams);
    }
  }
}

TEST(HannTest, KernelForms) {
  // e_max = 2, J = 4, R = 3: frequency 2 pi * 2 / 6.
  const double f = 2.0 * std::numbers::pi * 2.0 / 6.0;
  for (double x: { -2.0, -0.7, 0.0, 0.4, 1.5, 3.0 }) {
    EXPECT_DOUBLE_EQ(hann_kernel(x, 4, 3.0, 2.0, HannVariant::kPaperExact),
                     0.5 + 0.5 * std::cos(f * x + 0.5));
  }
  EXPECT_DOUBLE_EQ(hann_kernel(0.0, 4, 3.0, 2.0, HannVariant::kStandardHann), 1.0);
  EXPECT_NEAR(hann_kernel(1.5, 4, 3.0, 2.0, HannVariant::kStandardHann), 0.0, 1e-15);
  EXPECT_EQ(hann_kernel(1.51, 4, 3.0, 2.0, HannVariant::kStandardHann), 0.0);
  EXPECT_EQ(hann_kernel(-1.51, 4, 3.0, 2.0, HannVariant::kStandardHann), 0.0);
  for (double l: { 0.0, 1.0, 2.0 }) {
    for (int j = 0; j < 4; ++j) {
      const double v = hann_kernel(l - hann_center(j, 4, 3.0, 2.0), 4, 3.0, 2.0,
                                   HannVariant::kStandardHann);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(HannTest, FiltersAreSymmetricSpectralOperators) {
  for (auto variant: { HannVariant::kPaperExact, HannVariant::kStandardHann }) {
    for (const auto &g: testing::corpus_molecules()) {
      const auto gm = build_matrices(g);
      const auto bank = hann_filters(gm.V, gm.eigvals, 4, 3.0, variant);
      for (const auto &h: bank.filters) {
        EXPECT_LT(max_abs_diff(h, transpose(h)), 1e-10);
      }
    }
  }
}

// Frame operator sum_j H_j^T H_j = V diag(sum_j psi_j^2) V^T; check its
// spectrum on a dense eigenvalue grid inside (0, e_max).
TEST(HannTest, StandardFrameCoversInterior) {
  for (int J: { 3, 4, 6 }) {
    for (double R: { 2.0, 3.0 }) {
      const double e_max = 2.0;
      double lo = 1e9;
      for (int i = 1; i < 1000; ++i) {
        const double l = e_max * i / 1000.0;
        double s = 0.0;
        for (int j = 0; j < J; ++j) {
          const double psi = hann_kernel(l - hann_center(j, J, R, e_max), J, R, e_max,
                                         HannVariant::kStandardHann);
          s += psi * psi;
        }
        lo = std::min(lo, s);
      }
      EXPECT_GT(lo, 0.0) << "J=" << J << " R=" << R;
    }
  }
  // And through the matrix route on a real molecule.
  const auto gm = build_matrices(parse_smiles("c1ccc2ccccc2c1"));
  const auto bank = hann_filters(gm.V, gm.eigvals, 4, 3.0, HannVariant::kStandardHann);
  Matrix frame(gm.V.rows(), gm.V.rows());
  for (const auto &h: bank.filters) {
    frame = frame + matmul_tn(h, h);
  }
  const auto eig = eig_sym(frame);
  EXPECT_GE(eig.values.front(), -1e-10);
}

TEST(ScatterTest, OrderZeroOfOnes) {
  const auto gm = build_matrices(parse_smiles("CCO"));
  const auto bank = diffusion_filters(gm.T, 4);
  const auto s = scatter_graph(Matrix(3, 1, 1.0), bank, 0);
  EXPECT_EQ(s.values, std::vector<double> { 1.0 });
}

TEST(ScatterTest, CountFormulaMatchesEnumeration) {
  const auto g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  const auto gm = build_matrices(g);
  for (int J = 1; J <= 5; ++J) {
    const auto bank = diffusion_filters(gm.T, J);
    for (int depth = 0; depth <= 3; ++depth) {
      const auto s = scatter_graph(g.node_features, bank, depth);
      std::size_t expected = 0, per = 7;
      for (int m = 0; m <= depth; ++m, per *= J) {
        expected += per;
      }
      EXPECT_EQ(s.values.size(), expected);
      EXPECT_EQ(s.labels.size(), expected);
      EXPECT_EQ(scatter_count(7, J, depth), expected);
    }
  }
  EXPECT_EQ(scatter_count(7, 4, 3) - 7, 588);
}

TEST(ScatterTest, MatchesDirectPathEvaluation) {
  const auto g = parse_smiles("Nc1ccc([N+](=O)[O-])cc1");
  const auto bank = diffusion_filters(build_matrices(g).T, 3);
  const auto s = scatter_graph(g.node_features, bank, 2);
  auto abs_m = [](Matrix m) {
    for (double &v: m.data()) {
      v = std::abs(v);
    }
    return m;
  };
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const auto &label = s.labels[k];
    Matrix u = g.node_features;
    for (int j: label.path) {
      u = abs_m(naive_matmul(bank.filters[j], u));
    }
    double mean = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) {
      mean += u(r, label.feature);
    }
    mean /= static_cast<double>(u.rows());
    EXPECT_NEAR(s.values[k], mean, 1e-10 * std::max(1.0, std::abs(mean)));
  }
  // Lexicographic paths within each order.
  EXPECT_EQ(s.labels[7].path, std::vector<int> { 0 });
  EXPECT_EQ(s.labels[7 + 21].path, (std::vector<int> { 0, 0 }));
  EXPECT_EQ(s.labels[7 + 21 + 7].path, (std::vector<int> { 0, 1 }));
  EXPECT_EQ(s.labels.back().path, (std::vector<int> { 2, 2 }));
}

TEST(ScatterTest, DimensionMismatch) {
  const auto bank = diffusion_filters(build_matrices(parse_smiles("CCO")).T, 2);
  try {
    scatter_graph(Matrix(4, 7), bank, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(GgsTest, LengthAndLabels) {
  const GgsConfig cfg;
  EXPECT_EQ(ggs_length(cfg), 595);
  const auto labels = ggs_labels(cfg);
  ASSERT_EQ(labels.size(), 595);
  EXPECT_EQ(labels.front(), "hann.s0.f0");
  EXPECT_EQ(labels[7], "diffusion.s1.0.f0");
  EXPECT_EQ(labels.back(), "diffusion.s3.3-3-3.f6");
  std::set<std::string> unique(labels.begin(), labels.end());
  EXPECT_EQ(unique.size(), labels.size());

  GgsConfig full;
  full.hann_block = HannBlock::kFull;
  EXPECT_EQ(ggs_length(full), 7 + 28 + 588);
  for (const auto &g: testing::corpus_molecules()) {
    const auto v = ggs_features(g, cfg);
    ASSERT_EQ(v.values.size(), 595);
    for (std::size_t k = 7; k < v.values.size(); ++k) {
      EXPECT_GE(v.values[k], -1e-12);
      EXPECT_TRUE(std::isfinite(v.values[k]));
    }
    EXPECT_EQ(ggs_features(g, full).values.size(), 623);
  }
}

TEST(GgsTest, PermutationInvariance) {
  Rng rng(8);
  GgsConfig full;
  full.hann_block = HannBlock::kFull;
  for (const auto &g: testing::corpus_molecules()) {
    const auto base = ggs_features(g, full).values;
    for (int t = 0; t < 50; ++t) {
      const auto perm = testing::random_permutation(g.atom_count(), rng);
      const auto v = ggs_features(permute_atoms(g, perm), full).values;
      for (std::size_t k = 0; k < v.size(); ++k) {
        ASSERT_NEAR(v[k], base[k], 1e-9 * std::max(1.0, std::abs(base[k])));
      }
    }
  }
}

TEST(GgsTest, SingleAtom) {
  const auto g = parse_smiles("[Cl-]");
  const auto v = ggs_features(g).values;
  ASSERT_EQ(v.size(), 595);
  // T = I so H_0 = 2I and H_j = 0 for j >= 1.
  for (int f = 0; f < 7; ++f) {
    EXPECT_DOUBLE_EQ(v[f], g.node_features(0, f));
    EXPECT_DOUBLE_EQ(v[7 + f], 2.0 * std::abs(g.node_features(0, f)));
    EXPECT_DOUBLE_EQ(v[7 + 7 + f], 0.0);
  }
  for (double x: v) {
    EXPECT_TRUE(std::isfinite(x));
  }
}

}  // namespace
}  // namespace geoscatt
