// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/elements.hpp"

#include <array>
#include <string>

#include "geoscatt/common/error.hpp"

namespace geoscatt {
namespace {

struct ElementInfo {
  std::string_view symbol;
  double mass;
};

// Conventional standard atomic weights, index = atomic number.
constexpr std::array<ElementInfo, kMaxAtomicNumber + 1> kElements { {
  { "*", 0.0 },       { "H", 1.008 },     { "He", 4.0026 },
  { "Li", 6.94 },     { "Be", 9.0122 },   { "B", 10.81 },
  { "C", 12.011 },    { "N", 14.007 },    { "O", 15.999 },
  { "F", 18.998 },    { "Ne", 20.180 },   { "Na", 22.990 },
  { "Mg", 24.305 },   { "Al", 26.982 },   { "Si", 28.085 },
  { "P", 30.974 },    { "S", 32.06 },     { "Cl", 35.45 },
  { "Ar", 39.95 },    { "K", 39.098 },    { "Ca", 40.078 },
  { "Sc", 44.956 },   { "Ti", 47.867 },   { "V", 50.942 },
  { "Cr", 51.996 },   { "Mn", 54.938 },   { "Fe", 55.845 },
  { "Co", 58.933 },   { "Ni", 58.693 },   { "Cu", 63.546 },
  { "Zn", 65.38 },    { "Ga", 69.723 },   { "Ge", 72.630 },
  { "As", 74.922 },   { "Se", 78.971 },   { "Br", 79.904 },
  { "Kr", 83.798 },   { "Rb", 85.468 },   { "Sr", 87.62 },
  { "Y", 88.906 },    { "Zr", 91.224 },   { "Nb", 92.906 },
  { "Mo", 95.95 },    { "Tc", 98.0 },     { "Ru", 101.07 },
  { "Rh", 102.91 },   { "Pd", 106.42 },   { "Ag", 107.87 },
  { "Cd", 112.41 },   { "In", 114.82 },   { "Sn", 118.71 },
  { "Sb", 121.76 },   { "Te", 127.60 },   { "I", 126.90 },
  { "Xe", 131.29 },   { "Cs", 132.91 },   { "Ba", 137.33 },
  { "La", 138.91 },   { "Ce", 140.12 },   { "Pr", 140.91 },
  { "Nd", 144.24 },   { "Pm", 145.0 },    { "Sm", 150.36 },
  { "Eu", 151.96 },   { "Gd", 157.25 },   { "Tb", 158.93 },
  { "Dy", 162.50 },   { "Ho", 164.93 },   { "Er", 167.26 },
  { "Tm", 168.93 },   { "Yb", 173.05 },   { "Lu", 174.97 },
  { "Hf", 178.49 },   { "Ta", 180.95 },   { "W", 183.84 },
  { "Re", 186.21 },   { "Os", 190.23 },   { "Ir", 192.22 },
  { "Pt", 195.08 },   { "Au", 196.97 },   { "Hg", 200.59 },
  { "Tl", 204.38 },   { "Pb", 207.2 },    { "Bi", 208.98 },
  { "Po", 209.0 },    { "At", 210.0 },    { "Rn", 222.0 },
  { "Fr", 223.0 },    { "Ra", 226.0 },    { "Ac", 227.0 },
} };

constexpr std::array kValH { 1 };
constexpr std::array kValB { 3 };
constexpr std::array kValC { 4 };
constexpr std::array kValN { 3, 5 };
constexpr std::array kValO { 2 };
constexpr std::array kValHalogen { 1 };
constexpr std::array kValSi { 4 };
constexpr std::array kValP { 3, 5 };
constexpr std::array kValS { 2, 4, 6 };
constexpr std::array kValHeavyHalogen { 1, 3, 5, 7 };

void check_range(int z) {
  if (z < 1 || z > kMaxAtomicNumber) {
    throw Error(ErrorCode::kUnknownElement,
                "atomic number out of range: " + std::to_string(z));
  }
}

}  // namespace

std::string_view element_symbol(int atomic_number) {
  check_range(atomic_number);
  return kElements[atomic_number].symbol;
}

std::optional<int> atomic_number_of(std::string_view symbol) {
  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kElements[z].symbol == symbol) {
      return z;
    }
  }
  return std::nullopt;
}

double atomic_mass(int atomic_number) {
  check_range(atomic_number);
  return kElements[atomic_number].mass;
}

std::span<const int> standard_valences(int atomic_number) {
  switch (atomic_number) {
  case 1:
    return kValH;
  case 5:
    return kValB;
  case 6:
    return kValC;
  case 7:
    return kValN;
  case 8:
    return kValO;
  case 9:
    return kValHalogen;
  case 14:
    return kValSi;
  case 15:
    return kValP;
  case 16:
    return kValS;
  case 17:
  case 35:
  case 53:
    return kValHeavyHalogen;
  default:
    return {};
  }
}

std::vector<int> charged_valences(int atomic_number, int formal_charge) {
  const auto base = standard_valences(atomic_number);
  std::vector<int> out;
  if (base.empty()) {
    out.push_back(0);
    return out;
  }
  if (formal_charge == 0) {
    out.assign(base.begin(), base.end());
    return out;
  }
  // Groups 13/14 lose a bond per unit of charge either way (C+, C-, B+);
  // B- gains one. Groups 15-17 and H shift with the charge (N+ -> 4,
  // O- -> 1).
  int shift;
  if (atomic_number == 5) {
    shift = -formal_charge;
  } else if (atomic_number == 6 || atomic_number == 14) {
    shift = -std::abs(formal_charge);
  } else if (atomic_number == 1) {
    shift = -std::abs(formal_charge);
  } else {
    shift = formal_charge;
  }
  for (int v: base) {
    if (v + shift >= 0) {
      out.push_back(v + shift);
    }
  }
  if (out.empty()) {
    out.push_back(0);
  }
  return out;
}

bool is_supported_nonmetal(int atomic_number) {
  switch (atomic_number) {
  case 1:
  case 5:
  case 6:
  case 7:
  case 8:
  case 9:
  case 14:
  case 15:
  case 16:
  case 17:
  case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

const std::vector<int> &default_metal_list() {
  static const std::vector<int> metals = [] {
    std::vector<int> m { 3, 11, 19, 37, 55, 87,    // alkali
                         4, 12, 20, 38, 56, 88 };  // alkaline earth
    for (int z = 21; z <= 30; ++z) {
      m.push_back(z);
    }
    for (int z = 39; z <= 48; ++z) {
      m.push_back(z);
    }
    m.push_back(57);
    for (int z = 72; z <= 80; ++z) {
      m.push_back(z);
    }
    m.push_back(89);
    return m;
  }();
  return metals;
}

bool is_halogen(int atomic_number) {
  return atomic_number == 9 || atomic_number == 17 || atomic_number == 35 ||
         atomic_number == 53;
}

}  // namespace geoscatt
