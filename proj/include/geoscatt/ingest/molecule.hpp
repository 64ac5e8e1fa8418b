// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Atom {
  int element = 6;
  int formal_charge = 0;
  bool aromatic = false;
  /// Hydrogens written inside a bracket atom, plus explicit [H] neighbours
  /// folded in by preprocessing.
  int explicit_h = 0;
  /// Derived from the valence table for organic-subset atoms.
  int implicit_h = 0;
  /// Bracket atoms never receive implicit hydrogens.
  bool bracket = false;
  bool in_ring = false;

  int total_h() const noexcept { return explicit_h + implicit_h; }
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
  /// Order in the Kekule structure (1, 2 or 3); aromatic bonds resolve to 1
  /// or 2.
  int kekule_order = 1;
};

/// Column layout of MolecularGraph::node_features.
enum NodeFeature : std::size_t {
  kFeatAtomicNumber = 0,
  kFeatFormalCharge,
  kFeatHybridization,
  kFeatTotalHydrogens,
  kFeatAromatic,
  kFeatAtomicMass,
  kFeatTotalValence,
};
inline constexpr std::size_t kNodeFeatureCount = 7;

/// Hybridization codes written into the feature matrix.
inline constexpr int kHybridSp = 1;
inline constexpr int kHybridSp2 = 2;
inline constexpr int kHybridSp3 = 3;

struct MolecularGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  /// N x 7, see NodeFeature.
  Matrix node_features;
  std::optional<int> label;

  std::size_t atom_count() const noexcept { return atoms.size(); }

  /// Neighbour lists (atom index, bond index), built on demand.
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;
  /// Number of connected components.
  std::size_t component_count() const;
};

/// Recomputes every derived quantity from atoms/bonds: implicit hydrogens,
/// ring membership, Kekule orders and the node feature matrix. Parsing and
/// preprocessing both end with this call.
void finalize_molecule(MolecularGraph &g);

/// Total valence (Kekule bond orders plus hydrogens) of atom i.
int total_valence(const MolecularGraph &g, std::size_t atom);

/// Same molecule with atom i moved to position perm[i].
MolecularGraph permute_atoms(const MolecularGraph &g,
                             const std::vector<int> &perm);

}  // namespace geoscatt

namespace geoscatt {

/// bridge[b] is true when removing bond b disconnects its endpoints.
std::vector<bool> bridge_bonds(const MolecularGraph &g);

}  // namespace geoscatt
