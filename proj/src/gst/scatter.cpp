// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/gst/scatter.hpp"

#include <cmath>
#include <functional>

#include "geoscatt/common/error.hpp"
#include "geoscatt/graphcore/graph_matrices.hpp"

namespace geoscatt {

namespace {

Matrix abs_of(Matrix m) {
  for (double &v: m.data()) {
    v = std::abs(v);
  }
  return m;
}

std::string label_text(const char *block, const ScatterLabel &l) {
  std::string out = block;
  out += ".s";
  out += std::to_string(l.order);
  if (!l.path.empty()) {
    out += '.';
    for (std::size_t k = 0; k < l.path.size(); ++k) {
      if (k > 0) {
        out += '-';
      }
      out += std::to_string(l.path[k]);
    }
  }
  out += ".f";
  out += std::to_string(l.feature);
  return out;
}

std::vector<ScatterLabel> scatter_labels(std::size_t features, int J, int depth) {
  std::vector<ScatterLabel> out;
  for (int order = 0; order <= depth; ++order) {
    std::vector<int> path(order, 0);
    while (true) {
      for (std::size_t f = 0; f < features; ++f) {
        out.push_back({ order, path, static_cast<int>(f) });
      }
      int k = order - 1;
      while (k >= 0 && path[k] == J - 1) {
        path[k--] = 0;
      }
      if (k < 0) {
        break;
      }
      ++path[k];
    }
  }
  return out;
}

}  // namespace

std::size_t scatter_count(std::size_t features, int J, int depth) {
  std::size_t total = 0, per_order = features;
  for (int m = 0; m <= depth; ++m) {
    total += per_order;
    per_order *= static_cast<std::size_t>(J);
  }
  return total;
}

ScatterCoefficients scatter_graph(const Matrix &X, const FilterBank &bank, int depth) {
  if (depth < 0) {
    throw Error(ErrorCode::kInvalidScaleParams, "depth must be >= 0");
  }
  if (depth > 0 && X.rows() != bank.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "signal has " + std::to_string(X.rows()) + " rows, filters are " +
                    std::to_string(bank.dimension()));
  }
  const int J = static_cast<int>(bank.filters.size());
  ScatterCoefficients out;
  out.labels = scatter_labels(X.cols(), J, depth);
  out.values.reserve(out.labels.size());

  // Order blocks are laid out one after another, so each order is filled
  // by its own depth-first walk over paths.
  const auto s0 = column_means(X);
  out.values.insert(out.values.end(), s0.begin(), s0.end());
  for (int order = 1; order <= depth; ++order) {
    std::function<void(const Matrix &, int)> walk = [&](const Matrix &u, int level) {
      for (int j = 0; j < J; ++j) {
        Matrix next = abs_of(matmul(bank.filters[j], u));
        if (level + 1 == order) {
          const auto means = column_means(next);
          out.values.insert(out.values.end(), means.begin(), means.end());
        } else {
          walk(next, level + 1);
        }
      }
    };
    walk(X, 0);
  }
  return out;
}

std::size_t ggs_length(const GgsConfig &cfg) {
  const std::size_t hann = cfg.hann_block == HannBlock::kZeroth
                               ? kNodeFeatureCount
                               : scatter_count(kNodeFeatureCount, cfg.hann_J, 1);
  return hann + scatter_count(kNodeFeatureCount, cfg.diffusion_J, cfg.diffusion_depth) -
         kNodeFeatureCount;
}

std::vector<std::string> ggs_labels(const GgsConfig &cfg) {
  std::vector<std::string> out;
  const int hann_depth = cfg.hann_block == HannBlock::kZeroth ? 0 : 1;
  for (const auto &l: scatter_labels(kNodeFeatureCount, cfg.hann_J, hann_depth)) {
    out.push_back(label_text("hann", l));
  }
  for (const auto &l:
       scatter_labels(kNodeFeatureCount, cfg.diffusion_J, cfg.diffusion_depth)) {
    if (l.order > 0) {
      out.push_back(label_text("diffusion", l));
    }
  }
  return out;
}

GgsVector ggs_features(const MolecularGraph &g, const GgsConfig &cfg) {
  const Matrix &X = g.node_features;
  if (X.cols() != kNodeFeatureCount || X.rows() != g.atom_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "node feature matrix is not N x 7");
  }
  if (cfg.hann_J < 1 || !(cfg.hann_R > 0.0) || !(cfg.hann_R < cfg.hann_J + 1)) {
    throw Error(ErrorCode::kInvalidScaleParams, "Hann scales need 0 < R < J+1");
  }
  const GraphMatrices gm = build_matrices(g);

  GgsVector out;
  if (cfg.hann_block == HannBlock::kZeroth) {
    const auto s0 = column_means(X);
    out.values.assign(s0.begin(), s0.end());
  } else {
    const auto bank =
        hann_filters(gm.V, gm.eigvals, cfg.hann_J, cfg.hann_R, cfg.hann_variant);
    out.values = scatter_graph(X, bank, 1).values;
  }

  const auto bank = diffusion_filters(gm.T, cfg.diffusion_J);
  const auto diff = scatter_graph(X, bank, cfg.diffusion_depth);
  out.values.insert(out.values.end(), diff.values.begin() + kNodeFeatureCount,
                    diff.values.end());
  out.labels = ggs_labels(cfg);
  return out;
}

}  // namespace geoscatt
