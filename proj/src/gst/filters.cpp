// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/gst/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geoscatt/common/error.hpp"

namespace geoscatt {

std::string_view hann_variant_name(HannVariant v) {
  return v == HannVariant::kPaperExact ? "paper-exact" : "standard-hann";
}

HannVariant parse_hann_variant(std::string_view name) {
  if (name == "paper-exact") {
    return HannVariant::kPaperExact;
  }
  if (name == "standard-hann") {
    return HannVariant::kStandardHann;
  }
  throw Error(ErrorCode::kConfigError,
              "unknown Hann variant '" + std::string(name) + "'");
}

FilterBank diffusion_filters(const Matrix &T, int J) {
  if (J < 1) {
    throw Error(ErrorCode::kInvalidScaleParams, "diffusion bank needs J >= 1");
  }
  if (T.rows() != T.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "T must be square");
  }
  FilterBank bank;
  bank.kind = FilterKind::kDiffusion;
  bank.J = J;
  bank.filters.push_back(Matrix::identity(T.rows()) + T);
  Matrix power = T;  // T^a, a = 2^(j-1)
  for (int j = 1; j < J; ++j) {
    Matrix next = matmul(power, power);
    bank.filters.push_back(power - next);
    power = std::move(next);
  }
  return bank;
}

double hann_center(int j, int J, double R, double e_max) {
  return (j + 1) * e_max / (J + 1 - R);
}

double hann_kernel(double x, int J, double R, double e_max, HannVariant variant) {
  const double freq = 2.0 * std::numbers::pi * (J + 1 - R) / (R * e_max);
  if (variant == HannVariant::kPaperExact) {
    return 0.5 + 0.5 * std::cos(freq * x + 0.5);
  }
  const double half_support = R * e_max / (2.0 * (J + 1 - R));
  if (std::abs(x) > half_support) {
    return 0.0;
  }
  return 0.5 + 0.5 * std::cos(freq * x);
}

FilterBank hann_filters(const Matrix &V, std::span<const double> eigvals, int J,
                        double R, HannVariant variant) {
  if (J < 1 || !(R > 0.0) || !(R < J + 1)) {
    throw Error(ErrorCode::kInvalidScaleParams,
                "Hann bank needs J >= 1 and 0 < R < J+1 (J=" + std::to_string(J) +
                    ", R=" + std::to_string(R) + ")");
  }
  const std::size_t n = V.rows();
  if (V.cols() != n || eigvals.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "eigensystem shape mismatch");
  }
  double e_max = 1e-6;
  for (double l: eigvals) {
    e_max = std::max(e_max, l);
  }

  FilterBank bank;
  bank.kind = FilterKind::kHann;
  bank.J = J;
  bank.R = R;
  bank.e_max = e_max;
  bank.variant = variant;
  for (int j = 0; j < J; ++j) {
    const double t = hann_center(j, J, R, e_max);
    // V diag(psi) V^T as (V diag(psi)) * V^T.
    Matrix scaled = V;
    for (std::size_t k = 0; k < n; ++k) {
      const double psi = hann_kernel(eigvals[k] - t, J, R, e_max, variant);
      for (std::size_t i = 0; i < n; ++i) {
        scaled(i, k) *= psi;
      }
    }
    bank.filters.push_back(matmul_nt(scaled, V));
  }
  return bank;
}

}  // namespace geoscatt
