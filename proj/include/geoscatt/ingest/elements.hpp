// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geoscatt {

inline constexpr int kMaxAtomicNumber = 89;

/// Symbol for an atomic number in [1, kMaxAtomicNumber].
std::string_view element_symbol(int atomic_number);
std::optional<int> atomic_number_of(std::string_view symbol);

/// Standard atomic weight (conventional value).
double atomic_mass(int atomic_number);

/// Allowed valences of the neutral element, ascending. Empty for elements
/// that never receive implicit hydrogens.
std::span<const int> standard_valences(int atomic_number);

/// Valences shifted by formal charge (isoelectronic rule: N+ behaves as C,
/// O- as F, C+/C- lose one bond).
std::vector<int> charged_valences(int atomic_number, int formal_charge);

/// Organic elements accepted by the parser besides metals:
/// H B C N O F Si P S Cl Br I.
bool is_supported_nonmetal(int atomic_number);

/// Alkali, alkaline-earth and transition metals (groups 1-12 except H).
const std::vector<int> &default_metal_list();

bool is_halogen(int atomic_number);

}  // namespace geoscatt
