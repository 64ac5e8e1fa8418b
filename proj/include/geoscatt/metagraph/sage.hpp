// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/common/tensor.hpp"
#include "geoscatt/gnn/nn.hpp"
#include "geoscatt/metagraph/metagraph.hpp"

namespace geoscatt {

inline constexpr std::size_t kSageHidden1 = 128;
inline constexpr std::size_t kSageHidden2 = 64;

/// Tensors in file order: sage1.weight (128, 2F), sage1.bias,
/// sage2.weight (64, 256), sage2.bias, head.weight (2, 64), head.bias.
/// Each SAGE layer is relu(W [h | mean_W(h of other nodes)] + b).
struct SageModel {
  TensorList params;
  double dropout = 0.5;
  /// Node features are standardized with these before layer 1.
  std::vector<double> input_mean;
  std::vector<double> input_scale;

  std::size_t input_dim() const noexcept { return input_mean.size(); }
};

enum SageTensor : std::size_t {
  kSage1Weight,
  kSage1Bias,
  kSage2Weight,
  kSage2Bias,
  kSageHeadWeight,
  kSageHeadBias,
  kSageTensorCount,
};

SageModel sage_init(std::size_t features, std::uint64_t seed);

/// n x 2 logits. Dropout (inverted scaling) is applied to the outputs of
/// both SAGE layers when active, with masks drawn from seed.
Matrix sage_forward(const MetaGraph &mg, const SageModel &model, bool dropout_active,
                    std::uint64_t seed = 0);

/// Mean cross-entropy over the nodes in `which`. When grad is non-null the
/// parameter gradient is added into it.
double sage_loss(const MetaGraph &mg, const SageModel &model, NodeSplit which,
                 TensorList *grad = nullptr, bool dropout_active = false,
                 std::uint64_t seed = 0);

struct SageConfig {
  AdamConfig adam { 1e-3, 0.9, 0.999, 1e-8, 1e-5 };
  int epochs = 1000;
  /// Negative disables early stopping.
  int patience = 50;
  double dropout = 0.5;
  std::uint64_t seed = 0;
};

/// Sets input_mean / input_scale from the training rows of mg (population
/// std, constant columns keep scale 1).
void sage_standardize(const MetaGraph &mg, SageModel &model);

/// Transductive training: full-graph forward every epoch, loss on train
/// nodes, early stopping on the validation loss (dropout off). Returns the
/// best-validation checkpoint; without validation nodes the last epoch.
SageModel train_sage(const MetaGraph &mg, const SageConfig &cfg, TrainLog *log = nullptr);

/// Probability of class 1 per node.
std::vector<double> sage_predict(const MetaGraph &mg, const SageModel &model);

/// Trainable tensors, then input.mean, input.scale and dropout (1).
void save_sage(const std::filesystem::path &path, const SageModel &model);
SageModel load_sage(const std::filesystem::path &path);

/// Finite-difference check of sage_loss on the train nodes, dropout off.
GradCheckResult sage_grad_check(const MetaGraph &mg, const SageModel &model,
                                const GradCheckOptions &opt = {});

}  // namespace geoscatt
