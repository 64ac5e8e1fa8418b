// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/scatter2d/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "geoscatt/common/error.hpp"
#include "geoscatt/graphcore/graph_matrices.hpp"
#include "geoscatt/ingest/canonical.hpp"
#include "geoscatt/ingest/elements.hpp"
#include "geoscatt/scatter2d/fft.hpp"

namespace geoscatt {

void write_pgm(const std::filesystem::path &path, const Image &img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << "P5\n" << img.size << ' ' << img.size << "\n255\n";
  std::vector<unsigned char> bytes(img.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

Image read_pgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  auto next_token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) {
          break;
        }
        continue;
      }
      tok += c;
    }
    return tok;
  };
  if (next_token() != "P5") {
    throw Error(ErrorCode::kFormatError, path.string() + " is not a binary PGM");
  }
  std::size_t w = 0, h = 0;
  int maxval = 0;
  try {
    w = std::stoul(next_token());
    h = std::stoul(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception &) {
    throw Error(ErrorCode::kFormatError, path.string() + ": bad PGM header");
  }
  if (w != h || w == 0 || maxval <= 0 || maxval > 255) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": need a square 8-bit PGM");
  }
  std::vector<unsigned char> bytes(w * h);
  in.read(reinterpret_cast<char *>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCode::kFormatError, path.string() + ": truncated pixel data");
  }
  Image img(w);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    img.pixels[i] = bytes[i] / static_cast<double>(maxval);
  }
  return img;
}

double atom_intensity(int element) {
  switch (element) {
  case 6:
    return 0.6;
  case 7:
    return 0.7;
  case 8:
    return 0.8;
  default:
    return is_halogen(element) ? 0.9 : 1.0;
  }
}

namespace {

// Probe vectors derived from canonical ranks. Projecting them onto an
// eigenspace gives a basis that follows the atoms under renumbering.
std::vector<std::vector<double>> rank_probes(const std::vector<int> &rank) {
  const std::size_t n = rank.size();
  std::vector<std::vector<double>> probes;
  std::vector<double> lin(n), quad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(rank[i]) + 1.0;
    lin[i] = r;
    quad[i] = r * r;
  }
  probes.push_back(lin);
  probes.push_back(quad);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  for (std::size_t i: order) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    probes.push_back(std::move(e));
  }
  return probes;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

// Two layout axes from the eigenvectors after the first. Inside a cluster
// of equal eigenvalues the eigensolver basis is arbitrary, so the axes are
// taken as projections of rank probes onto the cluster, orthonormalized.
std::array<std::vector<double>, 2> layout_axes(const EigenSystem &eig,
                                              const std::vector<int> &rank) {
  const std::size_t n = eig.values.size();
  const auto probes = rank_probes(rank);
  const double tol = 1e-8 * std::max(1.0, std::abs(eig.values.back()));
  std::vector<std::vector<double>> axes;
  std::size_t k = 1;
  while (k < n && axes.size() < 2) {
    std::size_t end = k + 1;
    while (end < n && eig.values[end] - eig.values[k] < tol) {
      ++end;
    }
    std::vector<std::vector<double>> basis;
    for (std::size_t c = k; c < end; ++c) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = eig.vectors(i, c);
      }
      basis.push_back(std::move(v));
    }
    const std::size_t want = std::min(basis.size(), 2 - axes.size());
    std::vector<std::vector<double>> picked;
    for (const auto &p: probes) {
      if (picked.size() == want) {
        break;
      }
      std::vector<double> v(n, 0.0);
      for (const auto &b: basis) {
        const double c = dot(b, p);
        for (std::size_t i = 0; i < n; ++i) {
          v[i] += c * b[i];
        }
      }
      for (const auto &q: picked) {
        const double c = dot(q, v);
        for (std::size_t i = 0; i < n; ++i) {
          v[i] -= c * q[i];
        }
      }
      const double norm = std::sqrt(dot(v, v));
      if (norm > 1e-6) {
        for (double &e: v) {
          e /= norm;
        }
        picked.push_back(std::move(v));
      }
    }
    for (auto &v: picked) {
      axes.push_back(std::move(v));
    }
    k = end;
  }
  while (axes.size() < 2) {
    axes.emplace_back(n, 0.0);
  }
  return { axes[0], axes[1] };
}

} // namespace

std::vector<std::array<double, 2>> spectral_layout(const MolecularGraph &g,
                                                   std::size_t size) {
  const std::size_t n = g.atom_count();
  const double s = static_cast<double>(size);
  const double centre = 0.5 * (s - 1.0);
  std::vector<std::array<double, 2>> pos(n, { centre, centre });
  if (n == 0 || n == 1) {
    return pos;
  }
  const auto rank = canonical_ranks(g);
  if (n == 2) {
    const std::size_t left = rank[0] < rank[1] ? 0 : 1;
    pos[left][0] = 0.1 * s;
    pos[1 - left][0] = 0.9 * s;
    return pos;
  }

  const auto eig = eig_sym(build_matrices(g).L);
  const auto axes = layout_axes(eig, rank);
  std::vector<double> x = axes[0], y = axes[1];
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double max_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] -= mx;
    y[i] -= my;
    max_r = std::max(max_r, std::hypot(x[i], y[i]));
  }
  if (max_r < 1e-12) {
    return pos;
  }

  // Fix rotation and reflection from canonical order so the drawing does
  // not depend on atom numbering or on the basis chosen inside a
  // degenerate eigenspace.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  const double eps = 1e-6 * max_r;
  for (std::size_t i: order) {
    if (std::hypot(x[i], y[i]) > eps) {
      const double angle = std::atan2(y[i], x[i]);
      const double c = std::cos(-angle), sn = std::sin(-angle);
      for (std::size_t k = 0; k < n; ++k) {
        const double xr = c * x[k] - sn * y[k];
        const double yr = sn * x[k] + c * y[k];
        x[k] = xr;
        y[k] = yr;
      }
      break;
    }
  }
  for (std::size_t i: order) {
    if (std::abs(y[i]) > eps) {
      if (y[i] < 0) {
        for (double &v: y) {
          v = -v;
        }
      }
      break;
    }
  }

  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double span = std::max(*xmax - *xmin, *ymax - *ymin);
  const double scale = 0.8 * (s - 1.0) / span;
  const double cx = 0.5 * (*xmax + *xmin), cy = 0.5 * (*ymax + *ymin);
  // Snap to a 2^-20 pixel grid so rounding noise from the eigensolver
  // cannot move a pixel decision that sits exactly on a half-pixel.
  auto snap = [](double v) { return std::ldexp(std::round(std::ldexp(v, 20)), -20); };
  for (std::size_t i = 0; i < n; ++i) {
    pos[i][0] = snap(centre + scale * (x[i] - cx));
    pos[i][1] = snap(centre - scale * (y[i] - cy));
  }
  return pos;
}

namespace {

void plot(Image &img, long r, long c, double v) {
  const long n = static_cast<long>(img.size);
  if (r >= 0 && c >= 0 && r < n && c < n) {
    double &p = img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    p = std::max(p, v);
  }
}

void line(Image &img, long x0, long y0, long x1, long y1, double v) {
  if (std::pair(x1, y1) < std::pair(x0, y0)) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const long dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  while (true) {
    plot(img, y0, x0, v);
    if (x0 == x1 && y0 == y1) {
      break;
    }
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

Image rasterize(const MolecularGraph &g, std::size_t size) {
  if (size < 16) {
    throw Error(ErrorCode::kSizeTooSmall,
                "image size " + std::to_string(size) + " is below 16");
  }
  if (!is_power_of_two(size)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image size " + std::to_string(size) + " is not a power of two");
  }
  Image img(size);
  const auto pos = spectral_layout(g, size);

  for (const auto &b: g.bonds) {
    const auto &p = pos[b.begin];
    const auto &q = pos[b.end];
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    const double len = std::hypot(dx, dy);
    const double nx = len > 0 ? -dy / len : 0.0, ny = len > 0 ? dx / len : 0.0;
    std::vector<double> offsets { 0.0 };
    if (b.order == BondOrder::kDouble) {
      offsets = { -1.0, 1.0 };
    } else if (b.order == BondOrder::kTriple) {
      offsets = { -2.0, 0.0, 2.0 };
    }
    for (double o: offsets) {
      line(img, std::lround(p[0] + o * nx), std::lround(p[1] + o * ny),
           std::lround(q[0] + o * nx), std::lround(q[1] + o * ny), 0.5);
    }
  }

  const double radius = static_cast<double>(size) / 64.0;
  const long reach = static_cast<long>(std::ceil(radius)) + 1;
  for (std::size_t i = 0; i < g.atom_count(); ++i) {
    const double v = atom_intensity(g.atoms[i].element);
    const long cr = std::lround(pos[i][1]), cc = std::lround(pos[i][0]);
    for (long r = cr - reach; r <= cr + reach; ++r) {
      for (long c = cc - reach; c <= cc + reach; ++c) {
        const double d = std::hypot(static_cast<double>(r) - pos[i][1],
                                    static_cast<double>(c) - pos[i][0]);
        if (d <= radius) {
          plot(img, r, c, v);
        }
      }
    }
  }
  return img;
}

}  // namespace geoscatt
