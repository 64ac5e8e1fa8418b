// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

/// Canonical atom ranks: iterative Morgan-style refinement of (element,
/// aromaticity, charge, hydrogens, degree, ring flag) labels with bond
/// orders, run to stability, with remaining ties broken one atom at a time.
std::vector<int> canonical_ranks(const MolecularGraph &g);

/// Permutation-invariant key: the bracket-atom SMILES written in canonical
/// rank order. It parses back to an isomorphic molecule.
std::string canonical_key(const MolecularGraph &g);

}  // namespace geoscatt
