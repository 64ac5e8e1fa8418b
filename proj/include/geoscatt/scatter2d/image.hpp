// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "geoscatt/ingest/molecule.hpp"

namespace geoscatt {

/// Square grayscale image, row-major, values in [0, 1].
struct Image {
  std::size_t size = 0;
  std::vector<double> pixels;

  Image() = default;
  explicit Image(std::size_t n) : size(n), pixels(n * n, 0.0) { }

  double &at(std::size_t row, std::size_t col) { return pixels[row * size + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels[row * size + col]; }
};

/// Binary PGM (P5, maxval 255). Values are clamped to [0, 1] and rounded.
void write_pgm(const std::filesystem::path &path, const Image &img);
/// Reads P5 files with maxval <= 255; the image must be square.
Image read_pgm(const std::filesystem::path &path);

/// Atom positions (x, y) in pixel units, as rasterize places them.
/// Coordinates come from Laplacian eigenvectors 2 and 3, rotated so the
/// first atom in canonical order lies on the +x axis and mirrored so the
/// next off-axis atom has y > 0, then scaled uniformly into the central 80%
/// box. One atom sits at the centre; two atoms sit at 10% and 90% of the
/// width.
std::vector<std::array<double, 2>> spectral_layout(const MolecularGraph &g,
                                                   std::size_t size);

/// Draws bonds as 1-px lines at intensity 0.5 (double and triple bonds as
/// parallel offsets) and atoms as discs of radius size/64 whose intensity
/// depends on the element class. Throws SizeTooSmall below 16 pixels and
/// DimensionMismatch if size is not a power of two.
Image rasterize(const MolecularGraph &g, std::size_t size);

/// Disc intensity: C 0.6, N 0.7, O 0.8, halogen 0.9, anything else 1.0.
double atom_intensity(int element);

}  // namespace geoscatt
