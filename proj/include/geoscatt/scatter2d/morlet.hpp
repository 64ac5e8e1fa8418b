// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geoscatt/scatter2d/fft.hpp"
#include "geoscatt/scatter2d/image.hpp"

namespace geoscatt {

struct MorletParams {
  /// Correction-Gaussian width of the mother wavelet; scale j uses
  /// sigma0 * 2^j.
  double sigma0 = 0.8;
  /// Wave number of the mother wavelet; scale j uses xi0 * 2^-j.
  double xi0 = 3.0 * 3.14159265358979323846 / 4.0;
  /// Lowpass width is lowpass_sigma0 * 2^J.
  double lowpass_sigma0 = 0.8;
};

struct MorletWavelet {
  int j = 0;
  int theta_index = 0;
  double theta = 0.0;
  double k = 0.0;
  double sigma = 0.0;
  Complex beta;
  /// n x n spectrum (row-major) of the periodized spatial filter.
  std::vector<Complex> spectrum;
};

struct MorletBank {
  int J = 0;
  int L = 0;
  std::size_t size = 0;
  MorletParams params;
  /// Index j * L + l.
  std::vector<MorletWavelet> wavelets;
  /// Spectrum of the unit-sum Gaussian lowpass.
  std::vector<Complex> lowpass;

  const MorletWavelet &wavelet(int j, int l) const { return wavelets[j * L + l]; }
  std::size_t filter_count() const { return wavelets.size() + 1; }
};

/// Spatial samples of wavelet (j, theta) on the n x n periodic grid, origin
/// at index 0:
///   (2 pi 4^j)^-1 [exp(i k.x) exp(-|x|^2 / (2 4^j)) - beta exp(-|x|^2 / (2 sigma^2))]
/// with k = xi0 2^-j (cos theta, sin theta), sigma = sigma0 2^j and every
/// periodic image within 2.5 n summed. beta is solved so the samples sum
/// to zero.
std::vector<Complex> morlet_spatial(int j, double theta, std::size_t n,
                                    const MorletParams &params, Complex *beta_out);

/// J * L wavelets with theta = l pi / L, plus the lowpass. Throws
/// DimensionMismatch unless size is a power of two >= 2^J.
MorletBank morlet_bank(int J, int L, std::size_t size, const MorletParams &params = {});

struct ScatterLabel2D {
  int order = 0;
  std::vector<int> j_path;
  std::vector<int> theta_path;
  std::size_t cell = 0;
};

struct ScatterVector2D {
  std::vector<double> values;
  std::vector<ScatterLabel2D> labels;
};

/// Channels: 1 + J L (order 1) + L^2 J (J-1) / 2 (order 2), each with
/// (size / 2^J)^2 cells.
std::size_t scatter2d_channels(int J, int L, int order);
std::size_t scatter2d_length(int J, int L, std::size_t size, int order);
std::vector<ScatterLabel2D> scatter2d_labels(int J, int L, std::size_t size, int order);
std::string label_text(const ScatterLabel2D &label);

/// Circular scattering up to the given order (0, 1 or 2). Lowpass and
/// subsampling by 2^J are done in the frequency domain by folding the
/// spectrum. Second order only pairs j1 < j2.
ScatterVector2D scatter_image(const Image &img, const MorletBank &bank, int order = 2);

}  // namespace geoscatt
