// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

enum class NodeSplit : std::uint8_t { kTrain, kVal, kTest };

std::string_view node_split_name(NodeSplit s) noexcept;
/// "train", "val" or "test"; ConfigError otherwise.
NodeSplit parse_node_split(std::string_view text);

/// Fully connected molecule graph. Every molecule is a node; labels are
/// stored for all nodes but training reads them only where split is kTrain
/// (and kVal for early stopping).
struct MetaGraph {
  Matrix features;
  /// Symmetric, entries in [0, 1], unit diagonal. The diagonal is never
  /// used for aggregation.
  Matrix weights;
  /// Kernel width; 0 when loaded from disk.
  double sigma = 0.0;
  std::vector<int> labels;
  std::vector<NodeSplit> split;

  std::size_t size() const noexcept { return features.rows(); }
};

/// Cosine similarity with 1e-12 added to each norm, mapped to a distance
/// d = 1 - (cos + 1) / 2. With sigma the population standard deviation of
/// the off-diagonal distances, W = exp(-d^2 / (2 sigma^2)) divided by its
/// largest off-diagonal value. Labels default to 0 and splits to kTrain.
/// Throws EmptyInput for fewer than two rows and ZeroVariance when every
/// pairwise distance is equal.
MetaGraph build_metagraph(const Matrix &S, unsigned threads = 1);

/// Keeps W_ij when j is among the k heaviest neighbours of i or i among
/// those of j (ties to the lower index); other off-diagonal weights become 0.
void sparsify_top_k(MetaGraph &mg, std::size_t k);

/// Row-normalized aggregation operator: P_ij = W_ij / sum_{k != i} W_ik for
/// j != i, P_ii = 0. Rows whose off-diagonal weights are all zero stay zero.
Matrix aggregation_matrix(const Matrix &weights);

/// Writes nodes.csv (node,mask,label), weights.fmat and features.fmat into
/// dir.
void save_metagraph(const std::filesystem::path &dir, const MetaGraph &mg);
MetaGraph load_metagraph(const std::filesystem::path &dir);

}  // namespace geoscatt
