// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "geoscatt/common/matrix.hpp"

namespace geoscatt {

enum class FilterKind { kDiffusion, kHann };

enum class HannVariant {
  /// 0.5 + 0.5 cos(2pi (J+1-R)/(R e_max) x + 0.5), evaluated as written,
  /// no support clipping.
  kPaperExact,
  /// Compact Hann window without the phase term, zero outside
  /// |x| <= R e_max / (2 (J+1-R)).
  kStandardHann,
};

std::string_view hann_variant_name(HannVariant v);
/// Accepts "paper-exact" and "standard-hann"; throws ConfigError otherwise.
HannVariant parse_hann_variant(std::string_view name);

struct FilterBank {
  FilterKind kind = FilterKind::kDiffusion;
  std::vector<Matrix> filters;
  int J = 0;
  // Hann parameters; unused for diffusion banks.
  double R = 0.0;
  double e_max = 0.0;
  HannVariant variant = HannVariant::kPaperExact;

  std::size_t dimension() const { return filters.empty() ? 0 : filters[0].rows(); }
};

/// H_0 = I + T and H_j = T^a - T^2a with a = 2^(j-1), for j = 1 .. J-1.
/// Dyadic powers come from repeated squaring.
FilterBank diffusion_filters(const Matrix &T, int J);

/// Centre t_j = (j+1) e_max / (J+1-R) of wavelet j = 0 .. J-1.
double hann_center(int j, int J, double R, double e_max);
double hann_kernel(double x, int J, double R, double e_max, HannVariant variant);

/// H_j = V diag(h(lambda - t_j)) V^T for j = 0 .. J-1, with
/// e_max = max(max eigenvalue, 1e-6). Throws InvalidScaleParams unless
/// 0 < R < J+1.
FilterBank hann_filters(const Matrix &V, std::span<const double> eigvals, int J,
                        double R, HannVariant variant);

}  // namespace geoscatt
