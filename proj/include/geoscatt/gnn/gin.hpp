// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/common/tensor.hpp"
#include "geoscatt/gnn/nn.hpp"
#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

inline constexpr std::size_t kGinLayers = 3;
inline constexpr std::size_t kGinHidden = 64;
inline constexpr std::size_t kGinEmbedding = 128;

enum class Readout { kSum, kMean };

/// Trainable tensors in file order:
///   gin{0,1,2}.mlp1.weight (64, in), gin{l}.mlp1.bias (64),
///   gin{l}.mlp2.weight (64, 64), gin{l}.mlp2.bias (64),
///   post1.weight (128, 64), post1.bias, post2.weight (128, 128), post2.bias,
///   head.weight (2, 128), head.bias (2).
/// Layer l maps h to relu(mlp2(relu(mlp1((1 + eps_l) h + sum of neighbours)))).
/// The readout feeds post1, a ReLU and post2; post2's output is the
/// embedding, and head acts on relu(embedding).
struct GinModel {
  TensorList params;
  std::array<double, kGinLayers> eps {};
  Readout readout = Readout::kSum;
  /// Node features are standardized with these before layer 0.
  std::vector<double> input_mean = std::vector<double>(kNodeFeatureCount, 0.0);
  std::vector<double> input_scale = std::vector<double>(kNodeFeatureCount, 1.0);
};

enum GinTensor : std::size_t {
  kGinPost1Weight = 4 * kGinLayers,
  kGinPost1Bias,
  kGinPost2Weight,
  kGinPost2Bias,
  kGinHeadWeight,
  kGinHeadBias,
  kGinTensorCount,
};

/// All tensors zero.
GinModel gin_zeros();
GinModel gin_init(std::uint64_t seed);

struct GinOutput {
  std::vector<double> embedding;
  std::array<double, 2> logits {};
};

GinOutput gin_forward(const MolecularGraph &g, const GinModel &model);

/// Cross-entropy of one molecule. When grad is non-null the parameter
/// gradient is added into it (same layout as model.params).
double gin_loss(const MolecularGraph &g, int label, const GinModel &model,
                TensorList *grad = nullptr);

/// n x 128 embedding matrix, rows in input order.
Matrix gin_embeddings(const std::vector<MolecularGraph> &graphs,
                      const GinModel &model, unsigned threads = 1);

struct TrainConfig {
  AdamConfig adam;
  int epochs = 200;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  /// Stop once this many epochs pass without a new best validation loss;
  /// negative disables early stopping.
  int patience = 30;
  unsigned threads = 1;
  Readout readout = Readout::kSum;
};

struct LabeledGraphs {
  std::vector<MolecularGraph> graphs;
  std::vector<int> labels;
};

/// Adam on the mean cross-entropy. Input standardization comes from the
/// training nodes. Returns the parameters of the epoch with the lowest
/// validation loss.
GinModel train_gin(const LabeledGraphs &train, const LabeledGraphs &val,
                   const TrainConfig &cfg, TrainLog *log = nullptr);

/// Trainable tensors, then input.mean, input.scale, gin.eps (3) and
/// readout (1; 0 = sum, 1 = mean).
void save_gin(const std::filesystem::path &path, const GinModel &model);
GinModel load_gin(const std::filesystem::path &path);

/// Compares the analytic gradient of gin_loss with central differences for
/// every trainable parameter.
GradCheckResult gin_grad_check(const GinModel &model, const MolecularGraph &g,
                               int label, const GradCheckOptions &opt = {});

}  // namespace geoscatt
