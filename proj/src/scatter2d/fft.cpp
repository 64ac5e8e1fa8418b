// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/scatter2d/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "geoscatt/common/error.hpp"

namespace geoscatt {

bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

Fft1d::Fft1d(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "FFT length " + std::to_string(n) + " is not a power of two");
  }
  bitrev_.resize(n);
  int bits = 0;
  while ((std::size_t { 1 } << bits) < n) {
    ++bits;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) {
      r |= ((i >> b) & 1U) << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
  // exp(-2 pi i k / n) for k < n/2; computed directly, not by recurrence.
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    twiddles_[k] = { std::cos(angle), std::sin(angle) };
  }
}

void Fft1d::run(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "FFT input length mismatch");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) {
      std::swap(data[i], data[bitrev_[i]]);
    }
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = twiddles_[k * stride];
        const double wi = inverse ? -w.imag() : w.imag();
        const Complex x = data[start + k + half];
        // Written out to avoid the NaN-checking complex multiply.
        const Complex t { w.real() * x.real() - wi * x.imag(),
                          w.real() * x.imag() + wi * x.real() };
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto &v: data) {
      v *= scale;
    }
  }
}

Fft2d::Fft2d(std::size_t n) : fft_(n) { }

void Fft2d::run(std::span<Complex> data, bool inverse) const {
  const std::size_t n = fft_.size();
  if (data.size() != n * n) {
    throw Error(ErrorCode::kDimensionMismatch, "2D FFT input size mismatch");
  }
  for (std::size_t r = 0; r < n; ++r) {
    fft_.run(data.subspan(r * n, n), inverse);
  }
  std::vector<Complex> column(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      column[r] = data[r * n + c];
    }
    fft_.run(column, inverse);
    for (std::size_t r = 0; r < n; ++r) {
      data[r * n + c] = column[r];
    }
  }
}

}  // namespace geoscatt
