// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/common/tensor.hpp"

namespace geoscatt {

unsigned resolve_threads(int requested) {
  if (requested > 0) {
    return static_cast<unsigned>(requested);
  }
  if (const char *env = std::getenv("GEOSCATT_THREADS"); env != nullptr) {
    try {
      const int n = std::stoi(env);
      if (n > 0) {
        return static_cast<unsigned>(n);
      }
    } catch (const std::exception &) {
      throw Error(ErrorCode::kConfigError,
                  std::string("GEOSCATT_THREADS is not an integer: ") + env);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

double Rng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Tensor::Tensor(std::string n, std::vector<std::uint32_t> s)
    : name(std::move(n)), shape(std::move(s)) {
  std::size_t count = 1;
  for (auto d: shape) {
    count *= d;
  }
  values.assign(count, 0.0);
}

Matrix Tensor::as_matrix() const { return Matrix(rows(), cols(), values); }

void Tensor::assign(const Matrix &m) {
  if (m.rows() != rows() || m.cols() != cols()) {
    throw Error(ErrorCode::kShapeMismatch, "tensor '" + name + "' shape differs");
  }
  values.assign(m.data().begin(), m.data().end());
}

TensorList zeros_like(const TensorList &tensors) {
  TensorList out;
  out.reserve(tensors.size());
  for (const auto &t: tensors) {
    out.emplace_back(t.name, t.shape);
  }
  return out;
}

std::size_t parameter_count(const TensorList &tensors) {
  std::size_t n = 0;
  for (const auto &t: tensors) {
    n += t.values.size();
  }
  return n;
}

double squared_norm(const TensorList &tensors) {
  double s = 0.0;
  for (const auto &t: tensors) {
    for (double v: t.values) {
      s += v * v;
    }
  }
  return s;
}

}  // namespace geoscatt
