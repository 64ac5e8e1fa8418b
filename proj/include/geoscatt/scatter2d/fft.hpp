// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace geoscatt {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform of power-of-two length. The inverse
/// is scaled by 1/n.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<Complex> data) const { run(data, false); }
  void inverse(std::span<Complex> data) const { run(data, true); }
  void run(std::span<Complex> data, bool inverse) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;
};

/// Row-major n x n transform built from Fft1d along rows then columns.
class Fft2d {
 public:
  explicit Fft2d(std::size_t n);

  std::size_t size() const noexcept { return fft_.size(); }
  void forward(std::span<Complex> data) const { run(data, false); }
  void inverse(std::span<Complex> data) const { run(data, true); }

 private:
  void run(std::span<Complex> data, bool inverse) const;

  Fft1d fft_;
};

}  // namespace geoscatt
