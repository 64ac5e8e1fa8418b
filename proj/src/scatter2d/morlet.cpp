// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/scatter2d/morlet.hpp"

#include <cmath>
#include <numbers>

#include "geoscatt/common/error.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

namespace {

// Periodic images r = d + a n of each grid offset with |r| <= 2.5 n. The
// window is symmetric, so offsets d and -d see mirrored sums.
template <class Fn>
std::vector<Complex> periodized_1d(std::size_t n, Fn &&f) {
  const double limit = 2.5 * static_cast<double>(n);
  const long ln = static_cast<long>(n);
  std::vector<Complex> out(n);
  for (long u = 0; u < ln; ++u) {
    const long d = u < ln / 2 ? u : u - ln;
    Complex sum = 0.0;
    for (long a = -3; a <= 3; ++a) {
      const double r = static_cast<double>(d + a * ln);
      if (std::abs(r) <= limit) {
        sum += f(r);
      }
    }
    out[u] = sum;
  }
  return out;
}

std::vector<Complex> spectrum_of(std::vector<Complex> spatial, const Fft2d &fft) {
  fft.forward(spatial);
  return spatial;
}

}  // namespace

std::vector<Complex> morlet_spatial(int j, double theta, std::size_t n,
                                    const MorletParams &params, Complex *beta_out) {
  const double scale = std::ldexp(1.0, j);
  const double envelope = scale;  // mother envelope has unit width
  const double sigma = params.sigma0 * scale;
  const double k = params.xi0 / scale;
  const double k1 = k * std::cos(theta), k2 = k * std::sin(theta);

  auto wave = [&](double kk) {
    return periodized_1d(n, [&](double r) {
      return std::polar(std::exp(-r * r / (2.0 * envelope * envelope)), kk * r);
    });
  };
  const auto wx = wave(k1);  // along columns
  const auto wy = wave(k2);  // along rows
  const auto gauss = periodized_1d(
      n, [&](double r) { return Complex(std::exp(-r * r / (2.0 * sigma * sigma))); });

  Complex sx = 0.0, sy = 0.0, sg = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    sx += wx[u];
    sy += wy[u];
    sg += gauss[u];
  }
  const Complex beta = sx * sy / (sg * sg);
  if (beta_out != nullptr) {
    *beta_out = beta;
  }

  // Unit-mass envelope keeps the peak frequency response near 1, so modulus
  // layers do not amplify.
  const double norm = 1.0 / (2.0 * std::numbers::pi * scale * scale);
  std::vector<Complex> out(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      out[r * n + c] = norm * (wy[r] * wx[c] - beta * gauss[r] * gauss[c]);
    }
  }
  return out;
}

MorletBank morlet_bank(int J, int L, std::size_t size, const MorletParams &params) {
  if (J < 1 || L < 1) {
    throw Error(ErrorCode::kInvalidScaleParams, "Morlet bank needs J >= 1 and L >= 1");
  }
  if (!is_power_of_two(size) || size < (std::size_t { 1 } << J)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image size " + std::to_string(size) +
                    " must be a power of two >= 2^J");
  }
  const Fft2d fft(size);
  MorletBank bank;
  bank.J = J;
  bank.L = L;
  bank.size = size;
  bank.params = params;
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < L; ++l) {
      MorletWavelet w;
      w.j = j;
      w.theta_index = l;
      w.theta = l * std::numbers::pi / L;
      w.k = params.xi0 / std::ldexp(1.0, j);
      w.sigma = params.sigma0 * std::ldexp(1.0, j);
      w.spectrum = spectrum_of(morlet_spatial(j, w.theta, size, params, &w.beta), fft);
      bank.wavelets.push_back(std::move(w));
    }
  }

  const double sigma = params.lowpass_sigma0 * std::ldexp(1.0, J);
  const auto g = periodized_1d(
      size, [&](double r) { return Complex(std::exp(-r * r / (2.0 * sigma * sigma))); });
  double total = 0.0;
  for (const auto &v: g) {
    total += v.real();
  }
  std::vector<Complex> phi(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      phi[r * size + c] = g[r].real() * g[c].real() / (total * total);
    }
  }
  bank.lowpass = spectrum_of(std::move(phi), fft);
  return bank;
}

std::size_t scatter2d_channels(int J, int L, int order) {
  std::size_t channels = 1;
  if (order >= 1) {
    channels += static_cast<std::size_t>(J * L);
  }
  if (order >= 2) {
    channels += static_cast<std::size_t>(L * L) * J * (J - 1) / 2;
  }
  return channels;
}

std::size_t scatter2d_length(int J, int L, std::size_t size, int order) {
  const std::size_t m = size >> J;
  return scatter2d_channels(J, L, order) * m * m;
}

std::vector<ScatterLabel2D> scatter2d_labels(int J, int L, std::size_t size, int order) {
  const std::size_t cells = (size >> J) * (size >> J);
  std::vector<ScatterLabel2D> out;
  auto add = [&](int ord, std::vector<int> js, std::vector<int> ls) {
    for (std::size_t c = 0; c < cells; ++c) {
      out.push_back({ ord, js, ls, c });
    }
  };
  add(0, {}, {});
  if (order >= 1) {
    for (int j = 0; j < J; ++j) {
      for (int l = 0; l < L; ++l) {
        add(1, { j }, { l });
      }
    }
  }
  if (order >= 2) {
    for (int j1 = 0; j1 < J; ++j1) {
      for (int l1 = 0; l1 < L; ++l1) {
        for (int j2 = j1 + 1; j2 < J; ++j2) {
          for (int l2 = 0; l2 < L; ++l2) {
            add(2, { j1, j2 }, { l1, l2 });
          }
        }
      }
    }
  }
  return out;
}

std::string label_text(const ScatterLabel2D &label) {
  std::string out = "s" + std::to_string(label.order);
  for (std::size_t k = 0; k < label.j_path.size(); ++k) {
    out += ".j" + std::to_string(label.j_path[k]) + "t" +
           std::to_string(label.theta_path[k]);
  }
  out += ".c" + std::to_string(label.cell);
  return out;
}

namespace {

class Scatterer {
 public:
  explicit Scatterer(const MorletBank &bank)
      : bank_(bank), n_(bank.size), m_(bank.size >> bank.J), fft_(n_), small_(m_) { }

  /// Lowpass, subsample by 2^J and append the m x m real cells.
  void smooth_into(const std::vector<Complex> &spectrum, std::vector<double> &out) const {
    std::vector<Complex> folded(m_ * m_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        const Complex v = spectrum[r * n_ + c];
        const Complex p = bank_.lowpass[r * n_ + c];
        folded[(r % m_) * m_ + (c % m_)] +=
            Complex(v.real() * p.real() - v.imag() * p.imag(),
                    v.real() * p.imag() + v.imag() * p.real());
      }
    }
    small_.inverse(folded);
    const double s = static_cast<double>(n_ / m_);
    for (const auto &v: folded) {
      out.push_back(v.real() / (s * s));
    }
  }

  /// Spectrum of |IFFT(spectrum * filter)|.
  std::vector<Complex> modulus_spectrum(const std::vector<Complex> &spectrum,
                                        const std::vector<Complex> &filter) const {
    std::vector<Complex> work = spectrum;
    const auto &k = simd::kernels();
    k.cmul(work.data(), filter.data(), work.size());
    fft_.inverse(work);
    std::vector<double> mag(work.size());
    k.cabs(work.data(), mag.data(), work.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
      work[i] = mag[i];
    }
    fft_.forward(work);
    return work;
  }

  ScatterVector2D run(const Image &img, int order) const {
    std::vector<Complex> x(img.pixels.begin(), img.pixels.end());
    fft_.forward(x);
    const int J = bank_.J, L = bank_.L;

    ScatterVector2D out;
    out.values.reserve(scatter2d_length(J, L, n_, order));
    smooth_into(x, out.values);
    if (order < 1) {
      out.labels = scatter2d_labels(J, L, n_, order);
      return out;
    }
    std::vector<double> second;
    for (int j1 = 0; j1 < J; ++j1) {
      for (int l1 = 0; l1 < L; ++l1) {
        const auto u1 = modulus_spectrum(x, bank_.wavelet(j1, l1).spectrum);
        smooth_into(u1, out.values);
        if (order < 2) {
          continue;
        }
        for (int j2 = j1 + 1; j2 < J; ++j2) {
          for (int l2 = 0; l2 < L; ++l2) {
            smooth_into(modulus_spectrum(u1, bank_.wavelet(j2, l2).spectrum), second);
          }
        }
      }
    }
    out.values.insert(out.values.end(), second.begin(), second.end());
    out.labels = scatter2d_labels(J, L, n_, order);
    return out;
  }

 private:
  const MorletBank &bank_;
  std::size_t n_;
  std::size_t m_;
  Fft2d fft_;
  Fft2d small_;
};

}  // namespace

ScatterVector2D scatter_image(const Image &img, const MorletBank &bank, int order) {
  if (img.size != bank.size || img.pixels.size() != img.size * img.size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image is " + std::to_string(img.size) + " px, bank expects " +
                    std::to_string(bank.size));
  }
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::kInvalidScaleParams, "scattering order must be 0, 1 or 2");
  }
  return Scatterer(bank).run(img, order);
}

}  // namespace geoscatt
