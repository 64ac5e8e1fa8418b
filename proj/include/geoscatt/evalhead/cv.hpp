// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/evalhead/logreg.hpp"
#include "geoscatt/evalhead/metrics.hpp"

namespace geoscatt {

struct HeadConfig {
  double l2 = 1e-2;
  LogRegConfig solver;
  double threshold = 0.5;
};

/// Fold index for every sample. Each class is shuffled with the seed and
/// the classes are dealt round-robin one after the other, so fold sizes
/// differ by at most one and every fold's class counts are within one of
/// the global ratio. Needs 2 <= k <= n and at least k members per class;
/// when k == n (leave-one-out) each class only needs two members.
/// Throws ConfigError for k < 2 and DegenerateSplit otherwise.
std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t k,
                                          std::uint64_t seed);

struct MetricSummary {
  double acc = 0.0;
  double se = 0.0;
  double sp = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double auc = 0.0;
};

struct CvReport {
  std::vector<MetricsReport> folds;
  /// Over folds; std uses k - 1. Folds whose AUC is undefined are left out
  /// of the AUC entries.
  MetricSummary mean;
  MetricSummary stddev;
  /// All out-of-fold scores scored together.
  MetricsReport pooled;
  std::vector<double> oof_scores;
  std::vector<std::size_t> fold_of;
};

/// Fits the logistic head on k - 1 folds and scores the held-out fold.
/// Folds run in parallel; results depend only on the seed.
CvReport kfold_cv(const Matrix &X, std::span<const int> y, std::size_t k,
                  std::uint64_t seed, const HeadConfig &cfg = {}, unsigned threads = 1);

/// fold,n,tp,tn,fp,fn,acc,se,sp,f1,mcc,auc,undefined with one row per fold
/// then mean, std and pooled rows. Undefined AUC is an empty field.
void write_cv_csv(const std::filesystem::path &path, const CvReport &report);
void print_cv_table(std::ostream &out, const CvReport &report);

/// Same columns with a single row labelled name.
void write_metrics_csv(const std::filesystem::path &path, const std::string &name,
                       const MetricsReport &report);
void print_metrics_table(std::ostream &out, const MetricsReport &report);

}  // namespace geoscatt
