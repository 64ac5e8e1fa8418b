// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "geoscatt/common/error.hpp"
#include "geoscatt/ingest/canonical.hpp"
#include "geoscatt/ingest/elements.hpp"

namespace geoscatt {

PreprocessOptions::PreprocessOptions() : metals(default_metal_list()) { }

std::vector<std::vector<int>> connected_components(const MolecularGraph &g) {
  const auto adj = g.adjacency();
  const int n = static_cast<int>(g.atoms.size());
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) {
      continue;
    }
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack { s };
    comp[s] = id;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      out[id].push_back(a);
      for (const auto &[nb, b]: adj[a]) {
        if (comp[nb] < 0) {
          comp[nb] = id;
          stack.push_back(nb);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

MolecularGraph induced_subgraph(const MolecularGraph &g,
                                const std::vector<int> &atoms) {
  std::vector<int> index(g.atoms.size(), -1);
  MolecularGraph out;
  out.label = g.label;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    index[atoms[k]] = static_cast<int>(k);
    out.atoms.push_back(g.atoms[atoms[k]]);
  }
  for (const auto &b: g.bonds) {
    if (index[b.begin] >= 0 && index[b.end] >= 0) {
      Bond nb = b;
      nb.begin = index[b.begin];
      nb.end = index[b.end];
      out.bonds.push_back(nb);
    }
  }
  return out;
}

MolecularGraph preprocess(const MolecularGraph &g, const PreprocessOptions &options) {
  MolecularGraph work = g;
  std::vector<bool> keep(work.atoms.size(), true);

  for (std::size_t i = 0; i < work.atoms.size(); ++i) {
    if (std::find(options.metals.begin(), options.metals.end(),
                  work.atoms[i].element) != options.metals.end()) {
      keep[i] = false;
    }
  }

  // Neutral hydrogens hanging off a single kept heavy atom become part of
  // that atom's hydrogen count.
  const auto adj = work.adjacency();
  for (std::size_t i = 0; i < work.atoms.size(); ++i) {
    const Atom &h = work.atoms[i];
    if (!keep[i] || h.element != 1 || h.formal_charge != 0) {
      continue;
    }
    std::vector<std::pair<int, int>> live;
    for (const auto &nb: adj[i]) {
      if (keep[nb.first]) {
        live.push_back(nb);
      }
    }
    if (live.size() != 1 || work.atoms[live[0].first].element == 1 ||
        work.bonds[live[0].second].order != BondOrder::kSingle) {
      continue;
    }
    work.atoms[live[0].first].explicit_h += 1 + h.explicit_h;
    keep[i] = false;
  }

  std::vector<int> kept;
  for (std::size_t i = 0; i < work.atoms.size(); ++i) {
    if (keep[i]) {
      kept.push_back(static_cast<int>(i));
    }
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyAfterPreprocess, "no atoms left after preprocessing");
  }
  MolecularGraph stripped = induced_subgraph(work, kept);
  finalize_molecule(stripped);

  const auto comps = connected_components(stripped);
  if (comps.size() == 1) {
    return stripped;
  }
  struct Candidate {
    MolecularGraph graph;
    std::string key;
  };
  std::optional<Candidate> best;
  for (const auto &comp: comps) {
    MolecularGraph frag = induced_subgraph(stripped, comp);
    finalize_molecule(frag);
    if (best) {
      const std::size_t na = frag.atoms.size(), nb = best->graph.atoms.size();
      if (na < nb) {
        continue;
      }
      if (na == nb) {
        if (frag.bonds.size() < best->graph.bonds.size()) {
          continue;
        }
        if (frag.bonds.size() == best->graph.bonds.size()) {
          std::string key = canonical_key(frag);
          if (key >= best->key) {
            continue;
          }
          best = Candidate { std::move(frag), std::move(key) };
          continue;
        }
      }
    }
    std::string key = canonical_key(frag);
    best = Candidate { std::move(frag), std::move(key) };
  }
  return std::move(best->graph);
}

}  // namespace geoscatt
