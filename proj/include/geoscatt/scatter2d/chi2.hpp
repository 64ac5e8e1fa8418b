// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

/// Per-column chi-squared statistic between the min-max scaled column
/// (treated as feature mass) and the binary class:
///   sum_c (O_c - E_c)^2 / E_c,  O_c = mass in class c,
///   E_c = total mass * fraction of rows in class c.
/// Constant columns score 0. Throws DegenerateLabels if y has one class.
std::vector<double> chi2_statistics(const Matrix &X, std::span<const int> y);

/// Top-k columns by statistic, descending, ties to the lower index.
std::vector<std::size_t> chi2_select(const Matrix &X, std::span<const int> y,
                                     std::size_t k);

/// Columns of X in the given order.
Matrix select_columns(const Matrix &X, std::span<const std::size_t> columns);

}  // namespace geoscatt
