// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

/// Named parameter tensor. Dense layer weights are stored (out, in).
struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::string n, std::vector<std::uint32_t> s);

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  /// Copies a 2D tensor into a Matrix (and back).
  Matrix as_matrix() const;
  void assign(const Matrix &m);

  bool operator==(const Tensor &) const = default;
};

/// Ordered list of tensors; the order is part of each model's file format.
using TensorList = std::vector<Tensor>;

TensorList zeros_like(const TensorList &tensors);
std::size_t parameter_count(const TensorList &tensors);
double squared_norm(const TensorList &tensors);

}  // namespace geoscatt
