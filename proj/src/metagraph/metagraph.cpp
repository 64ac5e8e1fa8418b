// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/metagraph/metagraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/io/csv.hpp"
#include "geoscatt/io/formats.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

std::string_view node_split_name(NodeSplit s) noexcept {
  switch (s) {
  case NodeSplit::kTrain:
    return "train";
  case NodeSplit::kVal:
    return "val";
  case NodeSplit::kTest:
    return "test";
  }
  return "train";
}

NodeSplit parse_node_split(std::string_view text) {
  if (text == "train") {
    return NodeSplit::kTrain;
  }
  if (text == "val") {
    return NodeSplit::kVal;
  }
  if (text == "test") {
    return NodeSplit::kTest;
  }
  throw Error(ErrorCode::kConfigError, "unknown node split '" + std::string(text) + "'");
}

MetaGraph build_metagraph(const Matrix &S, unsigned threads) {
  const std::size_t n = S.rows();
  if (n < 2) {
    throw Error(ErrorCode::kEmptyInput, "meta-graph needs at least two molecules");
  }
  const auto &k = simd::kernels();
  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Floor rather than offset: an additive guard breaks invariance under S -> cS.
    norm[i] = std::max(std::sqrt(k.dot(S.row(i).data(), S.row(i).data(), S.cols())), 1e-12);
  }
  Matrix d(n, n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double cos = std::clamp(
          k.dot(S.row(i).data(), S.row(j).data(), S.cols()) / (norm[i] * norm[j]), -1.0,
          1.0);
      d(i, j) = 1.0 - (cos + 1.0) / 2.0;
    }
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d(j, i) = d(i, j);
      sum += 2.0 * d(i, j);
    }
  }
  const double pairs = static_cast<double>(n * (n - 1));
  const double mean = sum / pairs;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        var += (d(i, j) - mean) * (d(i, j) - mean);
      }
    }
  }
  const double sigma = std::sqrt(var / pairs);
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kZeroVariance,
                "all pairwise embedding distances are equal; the kernel width is zero");
  }

  MetaGraph mg;
  mg.features = S;
  mg.sigma = sigma;
  mg.weights = Matrix(n, n);
  // K / max K evaluated as exp(log K - max log K): the same value, but it
  // cannot turn into 0 / 0 when every kernel entry underflows.
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        dmin = std::min(dmin, d(i, j));
      }
    }
  }
  const double top = -dmin * dmin / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      mg.weights(i, j) =
          i == j ? 1.0 : std::exp(-d(i, j) * d(i, j) / (2.0 * sigma * sigma) - top);
    }
  }
  mg.labels.assign(n, 0);
  mg.split.assign(n, NodeSplit::kTrain);
  return mg;
}

void sparsify_top_k(MetaGraph &mg, std::size_t k) {
  const std::size_t n = mg.size();
  if (k + 1 >= n) {
    return;
  }
  std::vector<std::vector<bool>> keep(n, std::vector<bool>(n, false));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mg.weights(i, a) > mg.weights(i, b);
    });
    std::size_t taken = 0;
    for (std::size_t j: order) {
      if (taken == k) {
        break;
      }
      if (j != i) {
        keep[i][j] = true;
        ++taken;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !keep[i][j] && !keep[j][i]) {
        mg.weights(i, j) = 0.0;
      }
    }
  }
}

Matrix aggregation_matrix(const Matrix &weights) {
  const std::size_t n = weights.rows();
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        total += weights(i, j);
      }
    }
    if (total > 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          p(i, j) = weights(i, j) / total;
        }
      }
    }
  }
  return p;
}

void save_metagraph(const std::filesystem::path &dir, const MetaGraph &mg) {
  std::filesystem::create_directories(dir);
  const auto nodes = dir / "nodes.csv";
  std::ofstream out(nodes);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + nodes.string());
  }
  out << "node,mask,label\n";
  for (std::size_t i = 0; i < mg.size(); ++i) {
    out << i << ',' << node_split_name(mg.split[i]) << ',' << mg.labels[i] << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for " + nodes.string());
  }
  write_fmat(dir / "weights.fmat", mg.weights);
  write_fmat(dir / "features.fmat", mg.features);
}

MetaGraph load_metagraph(const std::filesystem::path &dir) {
  MetaGraph mg;
  mg.weights = read_fmat(dir / "weights.fmat");
  mg.features = read_fmat(dir / "features.fmat");
  const auto nodes = dir / "nodes.csv";
  std::ifstream in(nodes);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + nodes.string());
  }
  std::string line;
  std::getline(in, line);
  if (trim(line) != "node,mask,label") {
    throw Error(ErrorCode::kFormatError, nodes.string() + ": unexpected header");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 3 || f[0] != std::to_string(mg.split.size()) ||
        (f[2] != "0" && f[2] != "1")) {
      throw Error(ErrorCode::kFormatError, nodes.string() + ": bad row '" + line + "'");
    }
    mg.split.push_back(parse_node_split(f[1]));
    mg.labels.push_back(f[2] == "1" ? 1 : 0);
  }
  const std::size_t n = mg.split.size();
  if (mg.features.rows() != n || mg.weights.rows() != n || mg.weights.cols() != n) {
    throw Error(ErrorCode::kShapeMismatch, dir.string() + ": meta-graph files disagree on size");
  }
  return mg;
}

}  // namespace geoscatt
