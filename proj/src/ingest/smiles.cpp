// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "geoscatt/common/error.hpp"
#include "geoscatt/ingest/elements.hpp"

namespace geoscatt {

SmilesOptions::SmilesOptions() : metals(default_metal_list()) { }

namespace {

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
         c == '\\' || c == '$';
}

class SmilesParser {
 public:
  SmilesParser(std::string_view text, const SmilesOptions &options)
      : s_(text), options_(options) { }

  MolecularGraph parse() {
    if (s_.empty()) {
      throw Error(ErrorCode::kEmptyInput, "empty SMILES", 0);
    }
    bool branch_just_opened = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev_ < 0 || pending_) {
          throw Error(ErrorCode::kInvalidSyntax, "branch without a preceding atom",
                      pos_);
        }
        branches_.push_back({ prev_, pos_ });
        branch_just_opened = true;
        ++pos_;
        continue;
      }
      if (c == ')') {
        if (branches_.empty()) {
          throw Error(ErrorCode::kUnbalancedParenthesis, "unmatched ')'", pos_);
        }
        if (pending_ || branch_just_opened) {
          throw Error(ErrorCode::kInvalidSyntax, "empty branch or dangling bond",
                      pos_);
        }
        prev_ = branches_.back().atom;
        branches_.pop_back();
        ++pos_;
        continue;
      }
      branch_just_opened = false;
      if (c == '.') {
        if (pending_ || !branches_.empty()) {
          throw Error(ErrorCode::kInvalidSyntax, "misplaced '.'", pos_);
        }
        prev_ = -1;
        ++pos_;
        continue;
      }
      if (is_bond_char(c)) {
        read_bond();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        read_ring_closure();
        continue;
      }
      if (c == '[' || std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
        const int atom = c == '[' ? read_bracket_atom() : read_organic_atom();
        if (prev_ >= 0) {
          add_chain_bond(prev_, atom);
        } else if (pending_) {
          throw Error(ErrorCode::kInvalidSyntax, "bond without a preceding atom",
                      pending_->pos);
        }
        pending_.reset();
        prev_ = atom;
        continue;
      }
      throw Error(ErrorCode::kInvalidSyntax,
                  std::string("unexpected character '") + c + "'", pos_);
    }

    if (!branches_.empty()) {
      throw Error(ErrorCode::kUnbalancedParenthesis, "unclosed '('",
                  branches_.back().pos);
    }
    if (!rings_.empty()) {
      const auto &[digit, open] = *rings_.begin();
      throw Error(ErrorCode::kUnmatchedRingBond,
                  "ring bond " + std::to_string(digit) + " never closed",
                  open.pos);
    }
    if (pending_) {
      throw Error(ErrorCode::kInvalidSyntax, "dangling bond", pending_->pos);
    }
    if (g_.atoms.empty()) {
      throw Error(ErrorCode::kEmptyInput, "no atoms", 0);
    }

    // An implicit bond between two aromatic atoms only stays aromatic
    // inside a ring (biphenyl-style links are single bonds).
    const auto bridges = bridge_bonds(g_);
    for (std::size_t b = 0; b < g_.bonds.size(); ++b) {
      if (implicit_aromatic_[b] && bridges[b]) {
        g_.bonds[b].order = BondOrder::kSingle;
      }
    }
    finalize_molecule(g_);
    return std::move(g_);
  }

 private:
  struct PendingBond {
    BondOrder order;
    std::size_t pos;
  };
  struct OpenBranch {
    int atom;
    std::size_t pos;
  };
  struct OpenRing {
    int atom;
    std::optional<PendingBond> bond;
    std::size_t pos;
  };

  void read_bond() {
    const char c = s_[pos_];
    if (pending_) {
      throw Error(ErrorCode::kInvalidSyntax, "two consecutive bond symbols", pos_);
    }
    BondOrder order = BondOrder::kSingle;
    switch (c) {
    case '=':
      order = BondOrder::kDouble;
      break;
    case '#':
      order = BondOrder::kTriple;
      break;
    case ':':
      order = BondOrder::kAromatic;
      break;
    case '$':
      throw Error(ErrorCode::kInvalidSyntax, "quadruple bonds are not supported",
                  pos_);
    default:
      break;
    }
    pending_ = PendingBond { order, pos_ };
    ++pos_;
  }

  void read_ring_closure() {
    const std::size_t start = pos_;
    int digit;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() + 0 ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
        throw Error(ErrorCode::kInvalidSyntax, "'%' needs two digits", pos_);
      }
      digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      digit = s_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) {
      throw Error(ErrorCode::kInvalidSyntax, "ring bond without an atom", start);
    }

    auto it = rings_.find(digit);
    if (it == rings_.end()) {
      rings_[digit] = OpenRing { prev_, pending_, start };
      pending_.reset();
      return;
    }

    const OpenRing open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) {
      throw Error(ErrorCode::kInvalidSyntax, "ring bond to the same atom", start);
    }
    std::optional<BondOrder> order;
    if (open.bond) {
      order = open.bond->order;
    }
    if (pending_) {
      if (order && *order != pending_->order) {
        throw Error(ErrorCode::kInvalidSyntax, "conflicting ring bond symbols",
                    pending_->pos);
      }
      order = pending_->order;
    }
    pending_.reset();
    add_bond(open.atom, prev_, order, start);
  }

  void add_chain_bond(int a, int b) {
    std::optional<BondOrder> order;
    if (pending_) {
      order = pending_->order;
    }
    add_bond(a, b, order, pending_ ? pending_->pos : pos_);
  }

  void add_bond(int a, int b, std::optional<BondOrder> order, std::size_t where) {
    for (const auto &bond: g_.bonds) {
      if ((bond.begin == a && bond.end == b) ||
          (bond.begin == b && bond.end == a)) {
        throw Error(ErrorCode::kInvalidSyntax, "duplicate bond", where);
      }
    }
    bool implicit_aromatic = false;
    if (!order) {
      if (g_.atoms[a].aromatic && g_.atoms[b].aromatic) {
        order = BondOrder::kAromatic;
        implicit_aromatic = true;
      } else {
        order = BondOrder::kSingle;
      }
    }
    g_.bonds.push_back({ a, b, *order, 1 });
    implicit_aromatic_.push_back(implicit_aromatic);
  }

  int push_atom(const Atom &atom) {
    g_.atoms.push_back(atom);
    return static_cast<int>(g_.atoms.size()) - 1;
  }

  void check_element(int z, std::string_view symbol, std::size_t where) const {
    if (is_supported_nonmetal(z)) {
      return;
    }
    if (std::find(options_.metals.begin(), options_.metals.end(), z) !=
        options_.metals.end()) {
      return;
    }
    throw Error(ErrorCode::kUnknownElement,
                "unsupported element '" + std::string(symbol) + "'", where);
  }

  int read_organic_atom() {
    const std::size_t start = pos_;
    const char c = s_[pos_];
    const char next = pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0';
    Atom atom;
    std::string symbol(1, c);
    if (c == 'C' && next == 'l') {
      symbol = "Cl";
    } else if (c == 'B' && next == 'r') {
      symbol = "Br";
    }
    switch (c) {
    case 'B':
    case 'C':
    case 'N':
    case 'O':
    case 'P':
    case 'S':
    case 'F':
    case 'I':
      break;
    case 'b':
    case 'c':
    case 'n':
    case 'o':
    case 'p':
    case 's':
      atom.aromatic = true;
      symbol[0] = static_cast<char>(std::toupper(c));
      break;
    default:
      throw Error(ErrorCode::kUnknownElement,
                  std::string("'") + c + "' is not an organic-subset atom", start);
    }
    atom.element = *atomic_number_of(symbol);
    pos_ += symbol.size();
    return push_atom(atom);
  }

  int read_number(int fallback) {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      return fallback;
    }
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 999) {
        throw Error(ErrorCode::kInvalidSyntax, "number too large", pos_);
      }
      ++pos_;
    }
    return v;
  }

  int read_bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;
    read_number(0);  // isotope, ignored

    if (pos_ >= s_.size()) {
      throw Error(ErrorCode::kInvalidSyntax, "unterminated bracket atom", open);
    }
    Atom atom;
    atom.bracket = true;
    const std::size_t sym_pos = pos_;
    const char c = s_[pos_];
    std::string symbol;
    if (c == '*') {
      throw Error(ErrorCode::kUnknownElement, "wildcard atoms are not supported",
                  sym_pos);
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        const std::string two { c, s_[pos_ + 1] };
        if (atomic_number_of(two)) {
          symbol = two;
        }
      }
      if (symbol.empty()) {
        symbol = std::string(1, c);
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      atom.aromatic = true;
      if (pos_ + 1 < s_.size() &&
          ((c == 's' && s_[pos_ + 1] == 'e') || (c == 'a' && s_[pos_ + 1] == 's'))) {
        symbol = { static_cast<char>(std::toupper(c)), s_[pos_ + 1] };
      } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' ||
                 c == 's') {
        symbol = std::string(1, static_cast<char>(std::toupper(c)));
      } else {
        throw Error(ErrorCode::kUnknownElement,
                    std::string("'") + c + "' is not an aromatic element", sym_pos);
      }
    } else {
      throw Error(ErrorCode::kInvalidSyntax, "expected an element symbol", sym_pos);
    }
    const auto z = atomic_number_of(symbol);
    if (!z) {
      throw Error(ErrorCode::kUnknownElement, "unknown element '" + symbol + "'",
                  sym_pos);
    }
    check_element(*z, symbol, sym_pos);
    atom.element = *z;
    pos_ += symbol.size();

    // Chirality marks are dropped.
    while (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
    }
    for (std::string_view cls: { "TH", "AL", "SP", "TB", "OH" }) {
      if (s_.substr(pos_, 2) == cls) {
        pos_ += 2;
        read_number(0);
        break;
      }
    }

    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      atom.explicit_h = read_number(1);
    }

    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      const std::size_t charge_pos = pos_;
      ++pos_;
      int magnitude = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        magnitude = read_number(1);
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 4) {
        throw Error(ErrorCode::kInvalidSyntax, "formal charge outside [-4, 4]",
                    charge_pos);
      }
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }

    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      read_number(0);  // atom class, ignored
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') {
      throw Error(ErrorCode::kInvalidSyntax, "expected ']'", pos_);
    }
    ++pos_;
    return push_atom(atom);
  }

  std::string_view s_;
  const SmilesOptions &options_;
  std::size_t pos_ = 0;
  MolecularGraph g_;
  std::vector<bool> implicit_aromatic_;
  int prev_ = -1;
  std::optional<PendingBond> pending_;
  std::vector<OpenBranch> branches_;
  std::map<int, OpenRing> rings_;
};

std::string atom_text(const Atom &a) {
  std::string out = "[";
  std::string sym(element_symbol(a.element));
  if (a.aromatic) {
    sym[0] = static_cast<char>(std::tolower(sym[0]));
  }
  out += sym;
  const int h = a.total_h();
  if (h > 0) {
    out += 'H';
    if (h > 1) {
      out += std::to_string(h);
    }
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    if (std::abs(a.formal_charge) > 1) {
      out += std::to_string(std::abs(a.formal_charge));
    }
  }
  out += ']';
  return out;
}

std::string bond_text(const MolecularGraph &g, const Bond &b, bool bridge) {
  const bool both_aromatic = g.atoms[b.begin].aromatic && g.atoms[b.end].aromatic;
  switch (b.order) {
  case BondOrder::kSingle:
    return both_aromatic ? "-" : "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return both_aromatic && !bridge ? "" : ":";
  }
  return "";
}

std::string ring_label(int digit) {
  return digit < 10 ? std::to_string(digit) : "%" + std::to_string(digit);
}

}  // namespace

MolecularGraph parse_smiles(std::string_view text, const SmilesOptions &options) {
  return SmilesParser(text, options).parse();
}

std::string write_smiles(const MolecularGraph &g, std::span<const int> rank) {
  const std::size_t n = g.atoms.size();
  std::vector<int> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    key[i] = rank.empty() ? static_cast<int>(i) : rank[i];
  }
  auto adj = g.adjacency();
  for (auto &list: adj) {
    std::sort(list.begin(), list.end(), [&](const auto &x, const auto &y) {
      return key[x.first] != key[y.first] ? key[x.first] < key[y.first]
                                          : x.second < y.second;
    });
  }
  const auto bridges = bridge_bonds(g);

  // Pass 1: DFS tree and ring-closure bonds.
  std::vector<bool> visited(n, false), bond_seen(g.bonds.size(), false);
  std::vector<std::vector<std::pair<int, int>>> children(n);
  // Per atom: (partner atom, bond, opens_here).
  std::vector<std::vector<std::tuple<int, int, bool>>> ring_bonds(n);
  std::vector<int> roots;

  std::function<void(int)> discover = [&](int a) {
    visited[a] = true;
    for (const auto &[nb, b]: adj[a]) {
      if (bond_seen[b]) {
        continue;
      }
      bond_seen[b] = true;
      if (!visited[nb]) {
        children[a].emplace_back(nb, b);
        discover(nb);
      } else {
        ring_bonds[nb].emplace_back(a, b, true);
        ring_bonds[a].emplace_back(nb, b, false);
      }
    }
  };
  std::vector<int> by_key(n);
  for (std::size_t i = 0; i < n; ++i) {
    by_key[i] = static_cast<int>(i);
  }
  std::sort(by_key.begin(), by_key.end(),
            [&](int x, int y) { return key[x] != key[y] ? key[x] < key[y] : x < y; });
  for (int start: by_key) {
    if (!visited[start]) {
      roots.push_back(start);
      discover(start);
    }
  }

  // Pass 2: emit in preorder, allocating the lowest free ring digit.
  std::string out;
  std::vector<bool> digit_used(100, false);
  std::vector<int> bond_digit(g.bonds.size(), -1);
  std::vector<int> emit_order(n, -1);
  int emitted = 0;

  std::function<void(int)> emit = [&](int a) {
    emit_order[a] = emitted++;
    out += atom_text(g.atoms[a]);
    auto &rb = ring_bonds[a];
    // Closures first (partner already written), then openings, each in
    // partner order.
    std::stable_sort(rb.begin(), rb.end(), [&](const auto &x, const auto &y) {
      const bool xo = std::get<2>(x), yo = std::get<2>(y);
      if (xo != yo) {
        return !xo;
      }
      return key[std::get<0>(x)] < key[std::get<0>(y)];
    });
    for (const auto &[partner, b, opens]: rb) {
      if (opens) {
        int d = 1;
        while (d < 100 && digit_used[d]) {
          ++d;
        }
        if (d == 100) {
          throw Error(ErrorCode::kInvalidSyntax, "more than 99 open rings");
        }
        digit_used[d] = true;
        bond_digit[b] = d;
        out += bond_text(g, g.bonds[b], bridges[b]);
        out += ring_label(d);
      } else {
        const int d = bond_digit[b];
        digit_used[d] = false;
        out += ring_label(d);
      }
    }
    const auto &kids = children[a];
    for (std::size_t c = 0; c < kids.size(); ++c) {
      const auto [child, b] = kids[c];
      const bool last = c + 1 == kids.size();
      if (!last) {
        out += '(';
      }
      out += bond_text(g, g.bonds[b], bridges[b]);
      emit(child);
      if (!last) {
        out += ')';
      }
    }
  };
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (r > 0) {
      out += '.';
    }
    emit(roots[r]);
  }
  return out;
}

}  // namespace geoscatt
