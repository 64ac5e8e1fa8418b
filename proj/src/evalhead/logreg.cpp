// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/evalhead/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geoscatt/common/error.hpp"
#include "geoscatt/io/formats.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double norm2(std::span<const double> v) {
  return simd::dot(v.data(), v.data(), v.size());
}

}  // namespace

double logreg_objective(const Matrix &Z, std::span<const int> y, double l2,
                        std::span<const double> w, double b,
                        std::vector<double> *grad) {
  const std::size_t n = Z.rows(), f = Z.cols();
  if (grad != nullptr) {
    grad->assign(f + 1, 0.0);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = y[i] == 1 ? 1.0 : -1.0;
    const double m = simd::dot(Z.row(i).data(), w.data(), f) + b;
    loss += softplus(-s * m);
    if (grad != nullptr) {
      const double r = -s * sigmoid(-s * m);
      simd::axpy(r, Z.row(i).data(), grad->data(), f);
      (*grad)[f] += r;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad != nullptr) {
    for (std::size_t j = 0; j < f; ++j) {
      (*grad)[j] = (*grad)[j] * inv_n + l2 * w[j];
    }
    (*grad)[f] *= inv_n;
  }
  return loss * inv_n + 0.5 * l2 * norm2(w);
}

LogRegModel fit_logreg(const Matrix &X, std::span<const int> y, double l2,
                       const LogRegConfig &cfg, LogRegFit *info) {
  const std::size_t n = X.rows(), f = X.cols();
  if (n == 0 || f == 0) {
    throw Error(ErrorCode::kEmptyInput, "empty feature matrix");
  }
  if (y.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(n) + " rows but " + std::to_string(y.size()) + " labels");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw Error(ErrorCode::kConfigError, "l2 must be finite and >= 0");
  }
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw Error(ErrorCode::kFormatError, "label is not 0 or 1", i);
    }
    n_pos += static_cast<std::size_t>(y[i]);
  }
  if (n_pos == 0 || n_pos == n) {
    throw Error(ErrorCode::kDegenerateLabels, "both classes are needed to fit");
  }

  const std::vector<double> mean = column_means(X);
  std::vector<double> scale(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = X(i, j) - mean[j];
      scale[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < f; ++j) {
    const double sd = std::sqrt(scale[j] / static_cast<double>(n));
    scale[j] = sd > 1e-12 * std::max(1.0, std::abs(mean[j])) ? sd : 0.0;
  }
  Matrix Z(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      Z(i, j) = scale[j] > 0 ? (X(i, j) - mean[j]) / scale[j] : 0.0;
    }
  }

  // x = (w, b) packed; the bias sits in the last slot.
  std::vector<double> x(f + 1, 0.0), g, x_new(f + 1), x_prev, g_prev;
  auto eval = [&](const std::vector<double> &p, std::vector<double> *grad) {
    return logreg_objective(Z, y, l2, std::span<const double>(p.data(), f), p[f], grad);
  };
  double fx = eval(x, &g);
  double step = 1.0;
  LogRegFit fit;
  for (; fit.iterations < cfg.max_iter; ++fit.iterations) {
    const double gg = norm2(g);
    if (std::sqrt(gg) < cfg.tol) {
      fit.converged = true;
      break;
    }
    if (!x_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t j = 0; j <= f; ++j) {
        const double s = x[j] - x_prev[j], d = g[j] - g_prev[j];
        ss += s * s;
        sy += s * d;
      }
      step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e10) : 2.0 * step;
    }
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      for (std::size_t j = 0; j <= f; ++j) {
        x_new[j] = x[j] - step * g[j];
      }
      accepted = eval(x_new, nullptr) <= fx - 1e-4 * step * gg;
      if (!accepted) {
        step *= 0.5;
      }
    }
    if (!accepted) {
      // No decrease is representable any more; the gradient is at the
      // rounding floor.
      break;
    }
    x_prev = x;
    g_prev = g;
    x = x_new;
    fx = eval(x, &g);
  }
  fit.grad_norm = std::sqrt(norm2(g));
  fit.objective = fx;
  if (info != nullptr) {
    *info = fit;
  }

  LogRegModel model;
  model.l2 = l2;
  model.weights.assign(f, 0.0);
  model.bias = x[f];
  for (std::size_t j = 0; j < f; ++j) {
    if (scale[j] > 0) {
      model.weights[j] = x[j] / scale[j];
      model.bias -= model.weights[j] * mean[j];
    }
  }
  return model;
}

std::vector<double> predict_proba(const LogRegModel &model, const Matrix &X) {
  if (X.cols() != model.weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.weights.size()) +
                    " features, got " + std::to_string(X.cols()));
  }
  std::vector<double> p(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    p[i] = sigmoid(simd::dot(X.row(i).data(), model.weights.data(), X.cols()) +
                   model.bias);
  }
  return p;
}

void save_logreg(const std::filesystem::path &path, const LogRegModel &model) {
  using U = std::uint32_t;
  Tensor w("logreg.weight", { U(model.weights.size()) });
  w.values = model.weights;
  Tensor b("logreg.bias", { 1 });
  b.values[0] = model.bias;
  Tensor l2("logreg.l2", { 1 });
  l2.values[0] = model.l2;
  write_tensors(path, { w, b, l2 });
}

LogRegModel load_logreg(const std::filesystem::path &path) {
  const TensorList t = read_tensors(path);
  if (t.size() != 3 || t[0].shape.size() != 1 || t[1].values.size() != 1 ||
      t[2].values.size() != 1) {
    throw Error(ErrorCode::kFormatError, path.string() + ": not a logistic head file");
  }
  LogRegModel model;
  model.weights = t[0].values;
  model.bias = t[1].values[0];
  model.l2 = t[2].values[0];
  return model;
}

}  // namespace geoscatt
