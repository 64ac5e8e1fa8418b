// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace geoscatt {

/// Bits set in MetricsReport::undefined when a rate had a zero denominator.
enum MetricFlag : std::uint8_t {
  kSeUndefined = 1U << 0,
  kSpUndefined = 1U << 1,
  kF1Undefined = 1U << 2,
  kMccUndefined = 1U << 3,
  kAucUndefined = 1U << 4,
};

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double acc = 0.0;
  double se = 0.0;
  double sp = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  /// NaN when only one class is present.
  double auc = 0.0;
  double threshold = 0.5;
  std::uint8_t undefined = 0;

  std::size_t size() const noexcept { return tp + tn + fp + fn; }
};

/// Rates from confusion counts. SE, SP, F1 and MCC are 0 when their
/// denominator is 0 and the matching flag is set. AUC is left NaN.
MetricsReport confusion_metrics(std::size_t tp, std::size_t tn, std::size_t fp,
                                std::size_t fn);

/// Mann-Whitney AUC with midranks for ties. NaN if a class is missing.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

/// A sample is predicted positive when its score is >= threshold.
/// Throws EmptyInput, DimensionMismatch, or FormatError for labels outside
/// {0, 1} and NaN scores.
MetricsReport metrics(std::span<const int> y_true, std::span<const double> scores,
                      double threshold = 0.5);

}  // namespace geoscatt
