// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

struct PreprocessOptions {
  std::vector<int> metals;
  PreprocessOptions();
};

/// Folds explicit hydrogen atoms into their neighbour's hydrogen count,
/// deletes metal atoms with their bonds and keeps the largest fragment
/// (most atoms, then most bonds, then smallest canonical key). Throws
/// EmptyAfterPreprocess when nothing is left.
MolecularGraph preprocess(const MolecularGraph &g,
                          const PreprocessOptions &options = PreprocessOptions());

/// Connected components as sorted atom index lists, ordered by their
/// smallest atom index.
std::vector<std::vector<int>> connected_components(const MolecularGraph &g);

/// Induced subgraph on the given atoms, in the given order.
MolecularGraph induced_subgraph(const MolecularGraph &g,
                                const std::vector<int> &atoms);

}  // namespace geoscatt
