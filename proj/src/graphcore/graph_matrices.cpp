// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/graphcore/graph_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoscatt/common/error.hpp"

namespace geoscatt {

namespace {

double off_diagonal_norm(const Matrix &a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) {
        sum += a(i, j) * a(i, j);
      }
    }
  }
  return std::sqrt(sum);
}

void rotate(Matrix &a, Matrix &v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) {
      continue;
    }
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenSystem eig_sym(const Matrix &m, int max_sweeps) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "eig_sym needs a square matrix");
  }
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-10) {
        throw Error(ErrorCode::kNotSymmetric,
                    "entries (" + std::to_string(i) + "," + std::to_string(j) +
                        ") differ from their transpose");
      }
    }
  }

  Matrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  Matrix v = Matrix::identity(n);
  const double tol = 1e-12 * std::max(1.0, frobenius_norm(a));

  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (sweep++ >= max_sweeps) {
      throw Error(ErrorCode::kNoConvergence,
                  "Jacobi did not converge in " + std::to_string(max_sweeps) +
                      " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) {
          rotate(a, v, p, q);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenSystem out { Matrix(n, n), std::vector<double>(n) };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    std::size_t big = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(v(i, src)) > std::abs(v(big, src)) + 1e-12) {
        big = i;
      }
    }
    const double sign = v(big, src) < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.vectors(i, k) = sign * v(i, src);
    }
  }
  return out;
}

Matrix adjacency_matrix(const MolecularGraph &g) {
  const std::size_t n = g.atom_count();
  Matrix w(n, n);
  for (const auto &b: g.bonds) {
    w(b.begin, b.end) = 1.0;
    w(b.end, b.begin) = 1.0;
  }
  return w;
}

GraphMatrices build_matrices(const MolecularGraph &g) {
  return build_matrices(adjacency_matrix(g));
}

GraphMatrices build_matrices(const Matrix &W) {
  const std::size_t n = W.rows();
  GraphMatrices out;
  out.W = W;
  out.D = Matrix(n, n);
  out.T = Matrix(n, n);
  out.L_norm = Matrix(n, n);
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      deg[i] += W(i, j);
    }
    out.D(i, i) = deg[i];
  }
  out.L = out.D - W;
  for (std::size_t i = 0; i < n; ++i) {
    if (deg[i] == 0.0) {
      out.T(i, i) = 1.0;
      continue;
    }
    out.L_norm(i, i) = 1.0;
    out.T(i, i) = 0.5;
    for (std::size_t j = 0; j < n; ++j) {
      if (W(i, j) != 0.0) {
        out.T(i, j) += 0.5 * W(i, j) / deg[i];
        if (deg[j] != 0.0) {
          out.L_norm(i, j) -= W(i, j) / std::sqrt(deg[i] * deg[j]);
        }
      }
    }
  }
  auto eig = eig_sym(out.L_norm);
  out.V = std::move(eig.vectors);
  out.eigvals = std::move(eig.values);
  return out;
}

}  // namespace geoscatt
