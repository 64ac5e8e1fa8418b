// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/canonical.hpp"

#include <algorithm>
#include <tuple>

#include "geoscatt/ingest/smiles.hpp"

namespace geoscatt {

namespace {

// Leaves (full tie-breaks) examined before falling back to the first
// member of each tied class.
constexpr int kLeafBudget = 64;

template <class Key>
std::vector<int> dense_ranks(const std::vector<Key> &keys) {
  std::vector<int> order(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    order[i] = static_cast<int>(i);
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size());
  int r = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && keys[order[k - 1]] < keys[order[k]]) {
      ++r;
    }
    rank[order[k]] = r;
  }
  return rank;
}

int class_count(const std::vector<int> &rank) {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const MolecularGraph &g) : g_(g), adj_(g.adjacency()) { }

  std::vector<int> initial() const {
    using Inv = std::tuple<int, bool, int, int, std::size_t, bool>;
    std::vector<Inv> inv;
    for (std::size_t i = 0; i < g_.atoms.size(); ++i) {
      const Atom &a = g_.atoms[i];
      inv.emplace_back(a.element, a.aromatic, a.formal_charge, a.total_h(),
                       adj_[i].size(), a.in_ring);
    }
    return dense_ranks(inv);
  }

  std::vector<int> refine(std::vector<int> rank) const {
    int classes = class_count(rank);
    while (true) {
      using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
      std::vector<Sig> sig(rank.size());
      for (std::size_t i = 0; i < rank.size(); ++i) {
        sig[i].first = rank[i];
        for (const auto &[nb, b]: adj_[i]) {
          sig[i].second.emplace_back(static_cast<int>(g_.bonds[b].order), rank[nb]);
        }
        std::sort(sig[i].second.begin(), sig[i].second.end());
      }
      auto next = dense_ranks(sig);
      const int next_classes = class_count(next);
      if (next_classes == classes) {
        return rank;
      }
      rank = std::move(next);
      classes = next_classes;
    }
  }

  /// Best (smallest) serialization reachable from rank, and its ranks.
  std::pair<std::string, std::vector<int>> search(std::vector<int> rank) {
    rank = refine(std::move(rank));
    const int n = static_cast<int>(rank.size());
    if (class_count(rank) == n) {
      --budget_;
      return { write_smiles(g_, rank), rank };
    }
    // Smallest tied class.
    std::vector<int> count(n, 0);
    for (int r: rank) {
      ++count[r];
    }
    int tied = 0;
    while (count[tied] < 2) {
      ++tied;
    }
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (rank[i] == tied) {
        members.push_back(i);
      }
    }

    std::pair<std::string, std::vector<int>> best;
    bool have = false;
    for (int m: members) {
      if (have && budget_ <= 0) {
        break;
      }
      std::vector<int> split(n);
      for (int i = 0; i < n; ++i) {
        split[i] = 2 * rank[i] + (rank[i] == tied && i != m ? 1 : 0);
      }
      auto candidate = search(dense_ranks(split));
      if (!have || candidate.first < best.first) {
        best = std::move(candidate);
        have = true;
      }
    }
    return best;
  }

 private:
  const MolecularGraph &g_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  int budget_ = kLeafBudget;
};

}  // namespace

std::vector<int> canonical_ranks(const MolecularGraph &g) {
  if (g.atoms.empty()) {
    return {};
  }
  Canonicalizer c(g);
  return c.search(c.initial()).second;
}

std::string canonical_key(const MolecularGraph &g) {
  if (g.atoms.empty()) {
    return {};
  }
  Canonicalizer c(g);
  return c.search(c.initial()).first;
}

}  // namespace geoscatt
