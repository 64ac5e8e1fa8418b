// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/common/tensor.hpp"

// Building blocks shared by the GIN and GraphSAGE models.

namespace geoscatt {

/// y = x W^T + b, with W stored (out, in).
Matrix affine(const Matrix &x, const Tensor &w, const Tensor &b);

/// Accumulates dW += dy^T x and db += column sums of dy. Writes dx = dy W
/// when dx is non-null.
void affine_backward(const Matrix &x, const Tensor &w, const Matrix &dy,
                     Tensor &dw, Tensor &db, Matrix *dx);

Matrix relu(Matrix z);
/// d[i] = 0 wherever z[i] <= 0 (the subgradient at 0 is 0).
void relu_backward(const Matrix &z, Matrix &d);

/// Two-class softmax cross-entropy for one row of logits. Returns the loss
/// and writes dloss/dlogits.
double softmax_xent(const double *logits, int label, double *dlogits);
std::array<double, 2> softmax2(const double *logits);
/// softmax_xent(logits + delta) - softmax_xent(logits), accurate to
/// relative rounding in the change rather than in the loss.
double softmax_xent_change(const double *logits, int label, const double *delta);
/// Same, from the base probabilities softmax2(logits).
double softmax_xent_change(const std::array<double, 2> &probs, int label, const double *delta);

/// Weights and bias drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void init_dense(Tensor &w, Tensor &b, Rng &rng);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled: every step first scales parameters by (1 - lr * weight_decay).
  double weight_decay = 0.0;
};

class Adam {
 public:
  Adam(const TensorList &params, const AdamConfig &cfg);
  void step(TensorList &params, const TensorList &grads);
  std::uint64_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  TensorList m_;
  TensorList v_;
  std::uint64_t t_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  /// Mean loss over the epoch's batches, before each batch's step.
  double train_loss = 0.0;
  /// Validation loss after the epoch's last step.
  double val_loss = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

void write_train_log(const std::filesystem::path &path, const TrainLog &log);

struct GradCheckOptions {
  /// Central-difference step.
  double h = 1e-5;
  /// Combine steps h and h/2 as (4 D(h/2) - D(h)) / 3, cancelling the h^2
  /// truncation term.
  bool richardson = false;
  /// Denominator floor for the relative error.
  double floor = 1e-6;
  /// Re-run the whole network for every perturbed loss instead of updating
  /// only what the perturbed entry can reach. Slow; kept as a reference.
  bool full_forward = false;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
  /// Parameters whose perturbation flips any ReLU.
  std::size_t excluded = 0;
  std::string worst;
  /// Finite-difference gradient, NaN where excluded.
  TensorList numeric;
};

/// Adds src into dst element-wise (same layout).
void accumulate(TensorList &dst, const TensorList &src, double scale = 1.0);

}  // namespace geoscatt
