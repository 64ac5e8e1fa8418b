// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/scatter2d/chi2.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "geoscatt/common/error.hpp"

namespace geoscatt {

std::vector<double> chi2_statistics(const Matrix &X, std::span<const int> y) {
  if (y.size() != X.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "label count differs from row count");
  }
  std::size_t positives = 0;
  for (int v: y) {
    if (v != 0 && v != 1) {
      throw Error(ErrorCode::kDegenerateLabels, "labels must be 0 or 1");
    }
    positives += static_cast<std::size_t>(v);
  }
  if (positives == 0 || positives == y.size()) {
    throw Error(ErrorCode::kDegenerateLabels, "chi2 needs both classes");
  }
  const double n = static_cast<double>(y.size());
  const double frac[2] = { (n - positives) / n, positives / n };

  std::vector<double> stats(X.cols(), 0.0);
  for (std::size_t c = 0; c < X.cols(); ++c) {
    double lo = X(0, c), hi = X(0, c);
    for (std::size_t r = 1; r < X.rows(); ++r) {
      lo = std::min(lo, X(r, c));
      hi = std::max(hi, X(r, c));
    }
    if (!(hi > lo)) {
      continue;
    }
    double observed[2] = { 0.0, 0.0 };
    for (std::size_t r = 0; r < X.rows(); ++r) {
      observed[y[r]] += (X(r, c) - lo) / (hi - lo);
    }
    const double total = observed[0] + observed[1];
    double stat = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double expected = total * frac[k];
      stat += (observed[k] - expected) * (observed[k] - expected) / expected;
    }
    stats[c] = stat;
  }
  return stats;
}

std::vector<std::size_t> chi2_select(const Matrix &X, std::span<const int> y,
                                     std::size_t k) {
  if (k > X.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot select " + std::to_string(k) + " of " +
                    std::to_string(X.cols()) + " columns");
  }
  const auto stats = chi2_statistics(X, y);
  std::vector<std::size_t> order(X.cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stats[a] > stats[b]; });
  order.resize(k);
  return order;
}

Matrix select_columns(const Matrix &X, std::span<const std::size_t> columns) {
  Matrix out(X.rows(), columns.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] >= X.cols()) {
        throw Error(ErrorCode::kDimensionMismatch, "column index out of range");
      }
      out(r, k) = X(r, columns[k]);
    }
  }
  return out;
}

}  // namespace geoscatt
