// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/evalhead/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "geoscatt/common/error.hpp"

namespace geoscatt {

namespace {

void validate(std::span<const int> y, std::span<const double> scores) {
  if (y.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no samples to score");
  }
  if (y.size() != scores.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(y.size()) + " labels but " +
                    std::to_string(scores.size()) + " scores");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw Error(ErrorCode::kFormatError, "label is not 0 or 1", i);
    }
    if (std::isnan(scores[i])) {
      throw Error(ErrorCode::kFormatError, "score is NaN", i);
    }
  }
}

double ratio(double num, double den, std::uint8_t flag, std::uint8_t &undefined) {
  if (den == 0.0) {
    undefined |= flag;
    return 0.0;
  }
  return num / den;
}

}  // namespace

MetricsReport confusion_metrics(std::size_t tp, std::size_t tn, std::size_t fp,
                                std::size_t fn) {
  MetricsReport r;
  r.tp = tp;
  r.tn = tn;
  r.fp = fp;
  r.fn = fn;
  const double TP = static_cast<double>(tp), TN = static_cast<double>(tn);
  const double FP = static_cast<double>(fp), FN = static_cast<double>(fn);
  const double n = TP + TN + FP + FN;
  r.acc = n > 0 ? (TP + TN) / n : 0.0;
  r.se = ratio(TP, TP + FN, kSeUndefined, r.undefined);
  r.sp = ratio(TN, TN + FP, kSpUndefined, r.undefined);
  r.f1 = ratio(2 * TP, 2 * TP + FP + FN, kF1Undefined, r.undefined);
  // Pairwise square roots keep the product of four marginals from
  // overflowing for large counts.
  const double den = std::sqrt((TP + FN) * (TP + FP)) * std::sqrt((TN + FN) * (TN + FP));
  r.mcc = ratio(TP * TN - FP * FN, den, kMccUndefined, r.undefined);
  r.mcc = std::clamp(r.mcc, -1.0, 1.0);
  r.auc = std::numeric_limits<double>::quiet_NaN();
  r.undefined |= kAucUndefined;
  return r;
}

double roc_auc(std::span<const int> y, std::span<const double> scores) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    // Ranks i+1 .. j share their mean.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (y[order[t]] == 1) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1) / 2) / (np * static_cast<double>(n_neg));
}

MetricsReport metrics(std::span<const int> y, std::span<const double> scores,
                      double threshold) {
  validate(y, scores);
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (y[i] == 1) {
      ++(pred ? tp : fn);
    } else {
      ++(pred ? fp : tn);
    }
  }
  MetricsReport r = confusion_metrics(tp, tn, fp, fn);
  r.threshold = threshold;
  r.auc = roc_auc(y, scores);
  if (!std::isnan(r.auc)) {
    r.undefined &= static_cast<std::uint8_t>(~kAucUndefined);
  }
  return r;
}

}  // namespace geoscatt
