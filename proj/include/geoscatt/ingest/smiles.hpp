// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

struct SmilesOptions {
  /// Metals accepted by the parser in addition to the supported organic
  /// elements. Defaults to default_metal_list().
  std::vector<int> metals;
  SmilesOptions();
};

/// Parses the organic subset plus bracket atoms, ring closures (including
/// %nn), branches and the bond symbols - = # : / \. Stereo marks are
/// accepted and dropped. Throws Error with EmptyInput, UnmatchedRingBond,
/// UnknownElement, UnbalancedParenthesis or InvalidSyntax; the error
/// position is a byte offset into text.
MolecularGraph parse_smiles(std::string_view text,
                            const SmilesOptions &options = SmilesOptions());

/// Writes every atom as a bracket atom with its total hydrogen count, so
/// parse_smiles(write_smiles(g)) reproduces atoms, charges, aromaticity and
/// hydrogen counts exactly. Traversal starts at the lowest-ranked atom and
/// visits neighbours in rank order; an empty rank uses atom indices.
std::string write_smiles(const MolecularGraph &g,
                         std::span<const int> rank = {});

}  // namespace geoscatt
