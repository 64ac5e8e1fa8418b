// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

struct LogRegConfig {
  std::size_t max_iter = 10000;
  /// Stop once the Euclidean norm of the gradient drops below this.
  double tol = 1e-6;
};

/// Weights and bias act on raw (unstandardized) features. l2 is the
/// penalty the model was fitted with, which applies to the standardized
/// weights.
struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
};

struct LogRegFit {
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;
  bool converged = false;
};

/// mean_i log(1 + exp(-s_i (z_i . w + b))) + (l2 / 2) |w|^2 with s = 2y - 1.
/// The bias is not penalized. If grad is given it receives d/dw followed by
/// d/db.
double logreg_objective(const Matrix &Z, std::span<const int> y, double l2,
                        std::span<const double> w, double b,
                        std::vector<double> *grad = nullptr);

/// Standardizes columns (population std; constant columns get weight 0),
/// then runs full-batch gradient descent from zero. Step sizes start from
/// the Barzilai-Borwein estimate and are halved until the Armijo condition
/// holds. Throws DegenerateLabels if a class is missing, ConfigError for
/// l2 < 0, DimensionMismatch / EmptyInput for bad shapes.
LogRegModel fit_logreg(const Matrix &X, std::span<const int> y, double l2,
                       const LogRegConfig &cfg = {}, LogRegFit *info = nullptr);

/// P(y = 1 | x) for every row.
std::vector<double> predict_proba(const LogRegModel &model, const Matrix &X);

/// GPRM file with logreg.weight (F), logreg.bias (1) and logreg.l2 (1).
void save_logreg(const std::filesystem::path &path, const LogRegModel &model);
LogRegModel load_logreg(const std::filesystem::path &path);

}  // namespace geoscatt
