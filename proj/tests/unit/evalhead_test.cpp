// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/evalhead/cv.hpp"
#include "geoscatt/evalhead/logreg.hpp"
#include "geoscatt/evalhead/metrics.hpp"
#include "support/metrics_oracle.hpp"

namespace geoscatt {
namespace {

TEST(MetricsTest, WorkedExample) {
  const MetricsReport r = confusion_metrics(50, 40, 10, 0);
  EXPECT_DOUBLE_EQ(r.acc, 0.9);
  EXPECT_DOUBLE_EQ(r.se, 1.0);
  EXPECT_DOUBLE_EQ(r.sp, 0.8);
  EXPECT_NEAR(r.f1, 10.0 / 11.0, 1e-15);
  EXPECT_NEAR(r.mcc, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_EQ(r.undefined & ~kAucUndefined, 0);

  // The same counts through scores.
  std::vector<int> y;
  std::vector<double> s;
  for (int i = 0; i < 50; ++i) { y.push_back(1); s.push_back(0.9); }
  for (int i = 0; i < 40; ++i) { y.push_back(0); s.push_back(0.1); }
  for (int i = 0; i < 10; ++i) { y.push_back(0); s.push_back(0.6); }
  const MetricsReport m = metrics(y, s);
  EXPECT_EQ(m.tp, 50U);
  EXPECT_EQ(m.tn, 40U);
  EXPECT_EQ(m.fp, 10U);
  EXPECT_EQ(m.fn, 0U);
  EXPECT_DOUBLE_EQ(m.auc, 1.0);
}

TEST(MetricsTest, MatchesBruteForceOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      // Coarse grid so ties, and scores exactly at the threshold, occur.
      s[i] = static_cast<double>(rng.below(9)) / 8.0;
    }
    const MetricsReport r = metrics(y, s);
    const auto o = testing::oracle_metrics(y, s, 0.5);
    ASSERT_EQ(r.tp, o.tp);
    ASSERT_EQ(r.tn, o.tn);
    ASSERT_EQ(r.fp, o.fp);
    ASSERT_EQ(r.fn, o.fn);
    ASSERT_NEAR(r.acc, o.acc, 1e-12);
    ASSERT_NEAR(r.se, o.se, 1e-12);
    ASSERT_NEAR(r.sp, o.sp, 1e-12);
    ASSERT_NEAR(r.f1, o.f1, 1e-12);
    ASSERT_NEAR(r.mcc, o.mcc, 1e-12);
    ASSERT_EQ(std::isnan(r.auc), std::isnan(o.auc));
    if (!std::isnan(o.auc)) {
      ASSERT_NEAR(r.auc, o.auc, 1e-12);
    }
  }
}

TEST(MetricsTest, AucEndpoints) {
  const std::vector<int> y { 0, 0, 1, 1, 0, 1 };
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double> { 0.1, 0.2, 0.7, 0.8, 0.3, 0.9 }), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double> { 0.9, 0.8, 0.2, 0.1, 0.7, 0.3 }), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double>(6, 0.4)), 0.5);
  EXPECT_TRUE(std::isnan(roc_auc(std::vector<int> { 1, 1 }, std::vector<double> { 0.2, 0.3 })));
}

TEST(MetricsTest, ZeroDenominatorConventions) {
  // Every prediction positive: TN + FN = 0, so MCC has a zero marginal.
  const std::vector<int> y { 1, 0, 1, 0 };
  const MetricsReport r = metrics(y, std::vector<double>(4, 0.9));
  EXPECT_EQ(r.sp, 0.0);
  EXPECT_EQ(r.mcc, 0.0);
  EXPECT_TRUE(r.undefined & kMccUndefined);
  EXPECT_FALSE(r.undefined & kSpUndefined);

  // No negatives at all: SP has nothing to divide by.
  const MetricsReport p = metrics(std::vector<int> { 1, 1 }, std::vector<double> { 0.9, 0.1 });
  EXPECT_EQ(p.sp, 0.0);
  EXPECT_TRUE(p.undefined & kSpUndefined);
  EXPECT_TRUE(p.undefined & kAucUndefined);
  EXPECT_TRUE(std::isnan(p.auc));

  // No positives, none predicted: SE and F1 are undefined.
  const MetricsReport z = metrics(std::vector<int> { 0, 0 }, std::vector<double> { 0.1, 0.2 });
  EXPECT_TRUE(z.undefined & kSeUndefined);
  EXPECT_TRUE(z.undefined & kF1Undefined);
  EXPECT_EQ(z.f1, 0.0);
  EXPECT_EQ(z.acc, 1.0);
}

TEST(MetricsTest, MccFlipSymmetry) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t tp = rng.below(30), tn = rng.below(30), fp = rng.below(30),
                      fn = rng.below(30);
    const double m = confusion_metrics(tp, tn, fp, fn).mcc;
    // Swapping both labels and predictions keeps MCC.
    EXPECT_NEAR(confusion_metrics(tn, tp, fn, fp).mcc, m, 1e-12);
    // Flipping predictions only negates it.
    EXPECT_NEAR(confusion_metrics(fn, fp, tn, tp).mcc, -m, 1e-12);
    EXPECT_LE(std::abs(m), 1.0);
  }
}

TEST(MetricsTest, AucInvariantUnderMonotoneTransform) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<int> y(n);
    std::vector<double> s(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i % 2);
      s[i] = static_cast<double>(rng.below(12)) - 6.0;
      t[i] = std::exp(0.5 * s[i]) * 3.0 + 1.0;
    }
    EXPECT_DOUBLE_EQ(roc_auc(y, s), roc_auc(y, t));
  }
}

TEST(MetricsTest, F1ClosedForm) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t tp = 1 + rng.below(30), fp = rng.below(30), fn = rng.below(30);
    const MetricsReport r = confusion_metrics(tp, rng.below(30), fp, fn);
    const double precision = double(tp) / double(tp + fp), recall = double(tp) / double(tp + fn);
    EXPECT_NEAR(r.f1, 2 * precision * recall / (precision + recall), 1e-12);
  }
}

TEST(MetricsTest, Errors) {
  const std::vector<int> y { 0, 1 };
  try {
    (void) metrics(std::vector<int> {}, std::vector<double> {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  EXPECT_THROW((void) metrics(y, std::vector<double> { 0.1 }), Error);
  EXPECT_THROW((void) metrics(std::vector<int> { 0, 2 }, std::vector<double> { 0.1, 0.2 }), Error);
  EXPECT_THROW((void) metrics(y, std::vector<double> { 0.1, NAN }), Error);
}

Matrix gaussian(std::size_t n, std::size_t f, Rng &rng) {
  Matrix x(n, f);
  for (double &v: x.data()) {
    v = rng.normal();
  }
  return x;
}

TEST(LogRegTest, SeparableOneDimensional) {
  Matrix x(20, 1);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i) * 3.0 + 100.0;
    y[i] = i >= 10;
  }
  LogRegFit info;
  const LogRegModel m = fit_logreg(x, y, 1e-3, {}, &info);
  EXPECT_TRUE(info.converged);
  EXPECT_LT(info.grad_norm, 1e-6);
  const MetricsReport r = metrics(y, predict_proba(m, x));
  EXPECT_EQ(r.acc, 1.0);
  EXPECT_GT(m.weights[0], 0.0);
}

TEST(LogRegTest, LargePenaltyPredictsPrior) {
  Rng rng(3);
  const Matrix x = gaussian(60, 5, rng);
  std::vector<int> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    y[i] = i < 15;
  }
  const LogRegModel m = fit_logreg(x, y, 1e6);
  for (double w: m.weights) {
    EXPECT_LT(std::abs(w), 1e-5);
  }
  for (double p: predict_proba(m, x)) {
    EXPECT_NEAR(p, 0.25, 1e-4);
  }
}

TEST(LogRegTest, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const Matrix z = gaussian(40, 6, rng);
  std::vector<int> y(40);
  for (auto &v: y) {
    v = static_cast<int>(rng.below(2));
  }
  std::vector<double> w(6);
  for (double &v: w) {
    v = rng.normal();
  }
  const double b = 0.3, l2 = 0.1;
  std::vector<double> grad;
  (void) logreg_objective(z, y, l2, w, b, &grad);
  const double h = 1e-5;
  for (std::size_t j = 0; j <= 6; ++j) {
    auto at = [&](double delta) {
      std::vector<double> wp = w;
      double bp = b;
      (j < 6 ? wp[j] : bp) += delta;
      return logreg_objective(z, y, l2, wp, bp);
    };
    const double fd = (at(h) - at(-h)) / (2 * h);
    EXPECT_NEAR(grad[j], fd, 1e-6) << j;
  }
}

TEST(LogRegTest, OptimumHasSmallGradientAndConstantColumnsGetZero) {
  Rng rng(6);
  Matrix x = gaussian(80, 4, rng);
  std::vector<int> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    y[i] = x(i, 0) + 0.5 * rng.normal() > 0;
    x(i, 2) = 7.0;
  }
  LogRegFit info;
  const LogRegModel m = fit_logreg(x, y, 1e-2, {}, &info);
  EXPECT_TRUE(info.converged);
  EXPECT_EQ(m.weights[2], 0.0);
  EXPECT_GT(m.weights[0], 0.0);

  // Folding back: scores on raw rows equal scores on standardized rows.
  const auto p = predict_proba(m, x);
  EXPECT_GT(metrics(y, p).auc, 0.8);
  const LogRegModel again = fit_logreg(x, y, 1e-2);
  EXPECT_EQ(again.weights, m.weights);
  EXPECT_EQ(again.bias, m.bias);
}

TEST(LogRegTest, ErrorsAndRoundTrip) {
  Matrix x(4, 2, 1.0);
  try {
    (void) fit_logreg(x, std::vector<int> { 1, 1, 1, 1 }, 0.1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
  EXPECT_THROW((void) fit_logreg(x, std::vector<int> { 1, 0, 1 }, 0.1), Error);
  EXPECT_THROW((void) fit_logreg(x, std::vector<int> { 1, 0, 1, 0 }, -1.0), Error);

  LogRegModel m;
  m.weights = { 0.5, -1.25, 3.0 };
  m.bias = -0.75;
  m.l2 = 0.01;
  const auto path = std::filesystem::temp_directory_path() / "geoscatt_logreg.gprm";
  save_logreg(path, m);
  const LogRegModel back = load_logreg(path);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.l2, m.l2);
  EXPECT_THROW((void) predict_proba(back, Matrix(2, 2)), Error);
  std::filesystem::remove(path);
}

TEST(FoldsTest, StratifiedSizes) {
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = i % 5 < 3;  // 60 / 40
  }
  const auto fold = stratified_folds(y, 10, 7);
  std::vector<int> size(10), pos(10);
  for (std::size_t i = 0; i < 100; ++i) {
    ++size[fold[i]];
    pos[fold[i]] += y[i];
  }
  for (int f = 0; f < 10; ++f) {
    EXPECT_EQ(size[f], 10);
    EXPECT_NEAR(pos[f], 6, 1);
  }
  EXPECT_EQ(stratified_folds(y, 10, 7), fold);
  EXPECT_NE(stratified_folds(y, 10, 8), fold);
}

TEST(FoldsTest, UnevenCountsStayWithinOne) {
  std::vector<int> y(37);
  for (std::size_t i = 0; i < 37; ++i) {
    y[i] = i < 13;
  }
  const auto fold = stratified_folds(y, 5, 1);
  std::vector<int> size(5), pos(5);
  for (std::size_t i = 0; i < 37; ++i) {
    ++size[fold[i]];
    pos[fold[i]] += y[i];
  }
  for (int f = 0; f < 5; ++f) {
    EXPECT_TRUE(size[f] == 7 || size[f] == 8);
    EXPECT_TRUE(pos[f] == 2 || pos[f] == 3);
  }
}

TEST(FoldsTest, Errors) {
  const std::vector<int> y { 0, 0, 0, 1, 1, 1, 1, 1 };
  EXPECT_THROW((void) stratified_folds(y, 1, 0), Error);
  try {
    (void) stratified_folds(y, 4, 0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateSplit);
  }
  EXPECT_THROW((void) stratified_folds(y, 9, 0), Error);
  EXPECT_NO_THROW((void) stratified_folds(y, 3, 0));
  EXPECT_NO_THROW((void) stratified_folds(y, 8, 0));
  EXPECT_THROW((void) stratified_folds(std::vector<int> { 0, 1, 1 }, 3, 0), Error);
}

TEST(CrossValidationTest, LeaveOneOutReportsPooledAuc) {
  Rng rng(11);
  Matrix x = gaussian(20, 3, rng);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    y[i] = i % 2;
    x(i, 0) += y[i] ? 1.5 : -1.5;
  }
  const CvReport r = kfold_cv(x, y, 20, 3);
  ASSERT_EQ(r.folds.size(), 20U);
  for (const auto &f: r.folds) {
    EXPECT_EQ(f.size(), 1U);
    EXPECT_TRUE(std::isnan(f.auc));
  }
  EXPECT_TRUE(std::isnan(r.mean.auc));
  EXPECT_FALSE(std::isnan(r.pooled.auc));
  EXPECT_GT(r.pooled.auc, 0.8);
}

TEST(CrossValidationTest, DeterministicAcrossThreadsAndCsv) {
  Rng rng(12);
  Matrix x = gaussian(100, 8, rng);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = x(i, 1) - x(i, 3) + rng.normal() > 0;
  }
  const CvReport a = kfold_cv(x, y, 10, 7, {}, 1);
  const CvReport b = kfold_cv(x, y, 10, 7, {}, 4);
  EXPECT_EQ(a.oof_scores, b.oof_scores);
  EXPECT_GT(a.mean.auc, 0.7);
  EXPECT_GT(a.stddev.auc, 0.0);

  const auto dir = std::filesystem::temp_directory_path();
  write_cv_csv(dir / "geoscatt_cv_a.csv", a);
  write_cv_csv(dir / "geoscatt_cv_b.csv", b);
  auto slurp = [](const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string text = slurp(dir / "geoscatt_cv_a.csv");
  EXPECT_EQ(text, slurp(dir / "geoscatt_cv_b.csv"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 10 + 3);
  EXPECT_EQ(text.rfind("fold,n,tp,tn,fp,fn,acc,se,sp,f1,mcc,auc,undefined\n", 0), 0U);

  std::ostringstream table;
  print_cv_table(table, a);
  EXPECT_NE(table.str().find("pooled"), std::string::npos);
  std::filesystem::remove(dir / "geoscatt_cv_a.csv");
  std::filesystem::remove(dir / "geoscatt_cv_b.csv");
}

}  // namespace
}  // namespace geoscatt
