// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/gnn/nn.hpp"

#include <cmath>
#include <fstream>

#include "geoscatt/common/error.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

Matrix affine(const Matrix &x, const Tensor &w, const Tensor &b) {
  if (x.cols() != w.cols() || b.values.size() != w.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "input width does not match tensor '" + w.name + "'");
  }
  Matrix y(x.rows(), w.rows());
  simd::kernels().gemm_nt(x.data().data(), w.values.data(), y.data().data(),
                          x.rows(), w.rows(), w.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double *yi = y.row(i).data();
    for (std::size_t o = 0; o < y.cols(); ++o) {
      yi[o] += b.values[o];
    }
  }
  return y;
}

void affine_backward(const Matrix &x, const Tensor &w, const Matrix &dy,
                     Tensor &dw, Tensor &db, Matrix *dx) {
  const auto &k = simd::kernels();
  const std::size_t in = w.cols();
  for (std::size_t i = 0; i < dy.rows(); ++i) {
    const double *xi = x.row(i).data();
    for (std::size_t o = 0; o < dy.cols(); ++o) {
      const double g = dy(i, o);
      if (g != 0.0) {
        k.axpy(g, xi, dw.values.data() + o * in, in);
        db.values[o] += g;
      }
    }
  }
  if (dx != nullptr) {
    *dx = Matrix(dy.rows(), in);
    for (std::size_t i = 0; i < dy.rows(); ++i) {
      double *di = dx->row(i).data();
      for (std::size_t o = 0; o < dy.cols(); ++o) {
        const double g = dy(i, o);
        if (g != 0.0) {
          k.axpy(g, w.values.data() + o * in, di, in);
        }
      }
    }
  }
}

Matrix relu(Matrix z) {
  simd::kernels().relu(z.data().data(), z.size());
  return z;
}

void relu_backward(const Matrix &z, Matrix &d) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.data()[i] <= 0.0) {
      d.data()[i] = 0.0;
    }
  }
}

std::array<double, 2> softmax2(const double *logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
  return { e0 / (e0 + e1), e1 / (e0 + e1) };
}

double softmax_xent(const double *logits, int label, double *dlogits) {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  const auto p = softmax2(logits);
  if (dlogits != nullptr) {
    dlogits[0] = p[0] - (label == 0 ? 1.0 : 0.0);
    dlogits[1] = p[1] - (label == 1 ? 1.0 : 0.0);
  }
  return lse - logits[label];
}

double softmax_xent_change(const std::array<double, 2> &probs, int label, const double *delta) {
  return std::log1p(probs[0] * std::expm1(delta[0]) + probs[1] * std::expm1(delta[1])) -
         delta[label];
}

double softmax_xent_change(const double *logits, int label, const double *delta) {
  return softmax_xent_change(softmax2(logits), label, delta);
}

void init_dense(Tensor &w, Tensor &b, Rng &rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
  for (double &v: w.values) {
    v = rng.uniform(-bound, bound);
  }
  for (double &v: b.values) {
    v = rng.uniform(-bound, bound);
  }
}

Adam::Adam(const TensorList &params, const AdamConfig &cfg)
    : cfg_(cfg), m_(zeros_like(params)), v_(zeros_like(params)) {
  if (!(cfg.lr >= 0.0) || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.eps > 0.0) ||
      !(cfg.weight_decay >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "invalid Adam settings");
  }
}

void Adam::step(TensorList &params, const TensorList &grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double decay = 1.0 - cfg_.lr * cfg_.weight_decay;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto &p = params[t].values;
    auto &m = m_[t].values;
    auto &v = v_[t].values;
    const auto &g = grads[t].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1, vhat = v[i] / c2;
      p[i] = decay * p[i] - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void accumulate(TensorList &dst, const TensorList &src, double scale) {
  for (std::size_t t = 0; t < dst.size(); ++t) {
    auto &d = dst[t].values;
    const auto &s = src[t].values;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] += scale * s[i];
    }
  }
}

void write_train_log(const std::filesystem::path &path, const TrainLog &log) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out.precision(17);
  out << "epoch,train_loss,val_loss\n";
  for (const auto &e: log.epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

}  // namespace geoscatt
