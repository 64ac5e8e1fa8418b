// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/molecule.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "geoscatt/common/error.hpp"
#include "geoscatt/ingest/elements.hpp"

namespace geoscatt {

std::vector<std::vector<std::pair<int, int>>> MolecularGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(atoms.size());
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    adj[bonds[b].begin].emplace_back(bonds[b].end, static_cast<int>(b));
    adj[bonds[b].end].emplace_back(bonds[b].begin, static_cast<int>(b));
  }
  return adj;
}

std::size_t MolecularGraph::component_count() const {
  std::vector<int> parent(atoms.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      x = parent[x] = parent[parent[x]];
    }
    return x;
  };
  std::size_t components = atoms.size();
  for (const auto &b: bonds) {
    const int ra = find(b.begin), rb = find(b.end);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components;
}

std::vector<bool> bridge_bonds(const MolecularGraph &g) {
  const auto adj = g.adjacency();
  const int n = static_cast<int>(g.atoms.size());
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> bridge(g.bonds.size(), false);
  int timer = 0;

  // Iterative Tarjan; the parent bond (not the parent atom) is skipped so
  // the check stays correct for any future multigraph input.
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) {
      continue;
    }
    std::vector<Frame> stack { { root, -1, 0 } };
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next < adj[f.atom].size()) {
        const auto [nb, bond] = adj[f.atom][f.next++];
        if (bond == f.parent_bond) {
          continue;
        }
        if (disc[nb] == -1) {
          disc[nb] = low[nb] = timer++;
          stack.push_back({ nb, bond, 0 });
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[done.atom]);
          if (low[done.atom] > disc[parent]) {
            bridge[done.parent_bond] = true;
          }
        }
      }
    }
  }
  return bridge;
}

namespace {

int bond_valence(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

/// Valence left after bonds and hydrogens, measured against the lowest
/// allowed valence (aromatic atoms) or the smallest one that fits.
void assign_hydrogens(MolecularGraph &g, std::vector<bool> &needs_double) {
  const auto adj = g.adjacency();
  needs_double.assign(g.atoms.size(), false);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    Atom &a = g.atoms[i];
    int bond_sum = 0;
    bool has_aromatic_bond = false;
    for (const auto &[nb, b]: adj[i]) {
      bond_sum += bond_valence(g.bonds[b].order);
      has_aromatic_bond |= g.bonds[b].order == BondOrder::kAromatic;
    }
    const auto valences = charged_valences(a.element, a.formal_charge);
    const int used = bond_sum + a.explicit_h;
    if (!a.bracket) {
      a.implicit_h = 0;
    }

    if (a.aromatic && has_aromatic_bond) {
      const int spare = valences.front() - used;
      if (a.bracket) {
        needs_double[i] = spare >= 1;
      } else if (spare >= 1) {
        needs_double[i] = true;
        a.implicit_h = spare - 1;
      }
      continue;
    }
    if (!a.bracket) {
      for (int v: valences) {
        if (v >= used) {
          a.implicit_h = v - used;
          break;
        }
      }
    }
  }
}

/// Picks a perfect matching over aromatic bonds between atoms that need a
/// double bond. Returns false if none exists within the search budget.
bool kekulize(MolecularGraph &g, const std::vector<bool> &needs_double) {
  const std::size_t n = g.atoms.size();
  std::vector<std::vector<std::pair<int, int>>> cand(n);
  for (std::size_t b = 0; b < g.bonds.size(); ++b) {
    const Bond &bond = g.bonds[b];
    if (bond.order == BondOrder::kAromatic && needs_double[bond.begin] &&
        needs_double[bond.end]) {
      cand[bond.begin].emplace_back(bond.end, static_cast<int>(b));
      cand[bond.end].emplace_back(bond.begin, static_cast<int>(b));
    }
  }
  std::vector<int> mate(n, -1);
  std::vector<int> chosen;
  long budget = 200000;

  std::function<bool()> solve = [&]() -> bool {
    if (--budget < 0) {
      return false;
    }
    int best = -1;
    std::size_t best_options = SIZE_MAX;
    for (std::size_t i = 0; i < n; ++i) {
      if (!needs_double[i] || mate[i] != -1) {
        continue;
      }
      std::size_t options = 0;
      for (const auto &[nb, b]: cand[i]) {
        options += mate[nb] == -1 ? 1 : 0;
      }
      if (options < best_options) {
        best = static_cast<int>(i);
        best_options = options;
        if (options <= 1) {
          break;
        }
      }
    }
    if (best == -1) {
      return true;
    }
    for (const auto &[nb, b]: cand[best]) {
      if (mate[nb] != -1) {
        continue;
      }
      mate[best] = nb;
      mate[nb] = best;
      chosen.push_back(b);
      if (solve()) {
        return true;
      }
      chosen.pop_back();
      mate[best] = mate[nb] = -1;
    }
    return false;
  };

  const bool ok = solve();
  for (auto &bond: g.bonds) {
    bond.kekule_order = bond_valence(bond.order);
  }
  if (ok) {
    for (int b: chosen) {
      g.bonds[b].kekule_order = 2;
    }
  }
  return ok;
}

int hybridization(const MolecularGraph &g,
                  const std::vector<std::pair<int, int>> &neighbours) {
  int doubles = 0;
  bool triple = false, aromatic = false;
  for (const auto &[nb, b]: neighbours) {
    switch (g.bonds[b].order) {
    case BondOrder::kDouble:
      ++doubles;
      break;
    case BondOrder::kTriple:
      triple = true;
      break;
    case BondOrder::kAromatic:
      aromatic = true;
      break;
    default:
      break;
    }
  }
  if (triple || doubles >= 2) {
    return kHybridSp;
  }
  if (doubles > 0 || aromatic) {
    return kHybridSp2;
  }
  return kHybridSp3;
}

}  // namespace

void finalize_molecule(MolecularGraph &g) {
  const auto bridges = bridge_bonds(g);
  for (auto &a: g.atoms) {
    a.in_ring = false;
  }
  for (std::size_t b = 0; b < g.bonds.size(); ++b) {
    if (!bridges[b]) {
      g.atoms[g.bonds[b].begin].in_ring = true;
      g.atoms[g.bonds[b].end].in_ring = true;
    }
  }

  std::vector<bool> needs_double;
  assign_hydrogens(g, needs_double);
  kekulize(g, needs_double);

  const auto adj = g.adjacency();
  g.node_features = Matrix(g.atoms.size(), kNodeFeatureCount);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom &a = g.atoms[i];
    auto row = g.node_features.row(i);
    row[kFeatAtomicNumber] = a.element;
    row[kFeatFormalCharge] = a.formal_charge;
    row[kFeatHybridization] = hybridization(g, adj[i]);
    row[kFeatTotalHydrogens] = a.total_h();
    row[kFeatAromatic] = a.aromatic ? 1.0 : 0.0;
    row[kFeatAtomicMass] = atomic_mass(a.element);
    row[kFeatTotalValence] = total_valence(g, i);
  }
}

int total_valence(const MolecularGraph &g, std::size_t atom) {
  int v = g.atoms[atom].total_h();
  for (const auto &bond: g.bonds) {
    if (bond.begin == static_cast<int>(atom) ||
        bond.end == static_cast<int>(atom)) {
      v += bond.kekule_order;
    }
  }
  return v;
}

MolecularGraph permute_atoms(const MolecularGraph &g,
                             const std::vector<int> &perm) {
  if (perm.size() != g.atoms.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "permutation length differs from atom count");
  }
  MolecularGraph out;
  out.label = g.label;
  out.atoms.resize(g.atoms.size());
  out.node_features = Matrix(g.node_features.rows(), g.node_features.cols());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    out.atoms[perm[i]] = g.atoms[i];
    if (!g.node_features.empty()) {
      std::copy(g.node_features.row(i).begin(), g.node_features.row(i).end(),
                out.node_features.row(perm[i]).begin());
    }
  }
  out.bonds.reserve(g.bonds.size());
  for (const auto &b: g.bonds) {
    Bond nb = b;
    nb.begin = perm[b.begin];
    nb.end = perm[b.end];
    out.bonds.push_back(nb);
  }
  // Bond list order is also scrambled so consumers cannot rely on it.
  std::reverse(out.bonds.begin(), out.bonds.end());
  return out;
}

}  // namespace geoscatt
