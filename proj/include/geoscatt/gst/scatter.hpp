// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/gst/filters.hpp"
#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

struct ScatterLabel {
  int order = 0;
  /// Wavelet indices j_1 .. j_m; empty for order 0.
  std::vector<int> path;
  int feature = 0;
};

struct ScatterCoefficients {
  std::vector<double> values;
  std::vector<ScatterLabel> labels;
};

/// Order 0 is the column mean of X. Order m holds the column means of
/// |H_jm ... |H_j1 X| ...| for every path in lexicographic order, scales
/// repeating freely, so order m contributes F * J^m values.
ScatterCoefficients scatter_graph(const Matrix &X, const FilterBank &bank, int depth);

/// Number of coefficients scatter_graph returns.
std::size_t scatter_count(std::size_t features, int J, int depth);

enum class HannBlock {
  /// Only the order-0 block (F values).
  kZeroth,
  /// Orders 0 and 1 of the Hann cascade.
  kFull,
};

struct GgsConfig {
  int diffusion_J = 4;
  int diffusion_depth = 3;
  int hann_J = 4;
  double hann_R = 3.0;
  HannVariant hann_variant = HannVariant::kPaperExact;
  HannBlock hann_block = HannBlock::kZeroth;
};

struct GgsVector {
  /// [Hann block] ++ [diffusion orders 1 .. depth].
  std::vector<double> values;
  std::vector<std::string> labels;
};

/// Length of the vector ggs_features produces for this config (595 for the
/// defaults).
std::size_t ggs_length(const GgsConfig &cfg);
std::vector<std::string> ggs_labels(const GgsConfig &cfg);

GgsVector ggs_features(const MolecularGraph &g, const GgsConfig &cfg = {});

}  // namespace geoscatt
