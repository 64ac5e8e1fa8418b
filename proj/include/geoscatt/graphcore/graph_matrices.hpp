// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

struct EigenSystem {
  /// Eigenvectors as columns.
  Matrix vectors;
  /// Ascending.
  std::vector<double> values;
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Converged when the off-diagonal Frobenius norm drops below
/// 1e-12 * max(1, ||M||_F). Each eigenvector is signed so that its
/// largest-magnitude entry is positive.
///
/// Throws NotSymmetric when |M_ij - M_ji| > 1e-10 and NoConvergence after
/// max_sweeps sweeps.
EigenSystem eig_sym(const Matrix &m, int max_sweeps = 100);

struct GraphMatrices {
  /// 0/1 adjacency.
  Matrix W;
  Matrix D;
  /// D - W
  Matrix L;
  /// I - D^-1/2 W D^-1/2; rows of zero-degree nodes are zero.
  Matrix L_norm;
  /// (I + D^-1 W) / 2; zero-degree nodes get T_ii = 1.
  Matrix T;
  /// Eigensystem of L_norm.
  Matrix V;
  std::vector<double> eigvals;
};

Matrix adjacency_matrix(const MolecularGraph &g);

/// All matrices for one molecule, derived from the bond graph only.
GraphMatrices build_matrices(const MolecularGraph &g);
GraphMatrices build_matrices(const Matrix &W);

}  // namespace geoscatt
