// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/metagraph/sage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/io/formats.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

namespace {

TensorList sage_shapes(std::size_t features) {
  using U = std::uint32_t;
  TensorList t;
  t.emplace_back("sage1.weight", std::vector<U> { U(kSageHidden1), U(2 * features) });
  t.emplace_back("sage1.bias", std::vector<U> { U(kSageHidden1) });
  t.emplace_back("sage2.weight", std::vector<U> { U(kSageHidden2), U(2 * kSageHidden1) });
  t.emplace_back("sage2.bias", std::vector<U> { U(kSageHidden2) });
  t.emplace_back("head.weight", std::vector<U> { 2, U(kSageHidden2) });
  t.emplace_back("head.bias", std::vector<U> { 2 });
  return t;
}

void check_model(const SageModel &m, const MetaGraph &mg) {
  const std::size_t f = m.input_dim();
  const auto shapes = sage_shapes(f);
  if (m.params.size() != shapes.size() || m.input_scale.size() != f) {
    throw Error(ErrorCode::kShapeMismatch, "SAGE model has the wrong layout");
  }
  for (std::size_t t = 0; t < shapes.size(); ++t) {
    if (m.params[t].shape != shapes[t].shape) {
      throw Error(ErrorCode::kShapeMismatch,
                  "SAGE tensor '" + shapes[t].name + "' has the wrong shape");
    }
  }
  const std::size_t n = mg.size();
  if (mg.features.cols() != f || mg.weights.rows() != n || mg.weights.cols() != n ||
      mg.labels.size() != n || mg.split.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "meta-graph does not match the SAGE input width");
  }
}

Matrix hcat(const Matrix &a, const Matrix &b) {
  Matrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::copy(a.row(i).begin(), a.row(i).end(), c.row(i).begin());
    std::copy(b.row(i).begin(), b.row(i).end(), c.row(i).begin() + a.cols());
  }
  return c;
}

// Inverted dropout in place; mask holds 0 or 1 / (1 - rate).
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng &rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (double &v: mask.data()) {
    v = rng.uniform() < rate ? 0.0 : keep;
  }
  return mask;
}

void apply_mask(Matrix &x, const Matrix &mask) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x.data()[i] *= mask.data()[i];
  }
}

struct Trace {
  Matrix p, c1, z1, d1, c2, z2, d2, logits;
  Matrix mask1, mask2;
  bool dropout = false;
};

Trace forward(const MetaGraph &mg, const SageModel &m, bool dropout_active,
              std::uint64_t seed) {
  check_model(m, mg);
  const auto &w = m.params;
  Trace tr;
  tr.dropout = dropout_active && m.dropout > 0.0;
  Matrix x = mg.features;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      x(i, c) = (x(i, c) - m.input_mean[c]) / m.input_scale[c];
    }
  }
  tr.p = aggregation_matrix(mg.weights);
  tr.c1 = hcat(x, matmul(tr.p, x));
  tr.z1 = affine(tr.c1, w[kSage1Weight], w[kSage1Bias]);
  tr.d1 = relu(tr.z1);
  Rng rng(seed);
  if (tr.dropout) {
    tr.mask1 = dropout_mask(tr.d1.rows(), tr.d1.cols(), m.dropout, rng);
    apply_mask(tr.d1, tr.mask1);
  }
  tr.c2 = hcat(tr.d1, matmul(tr.p, tr.d1));
  tr.z2 = affine(tr.c2, w[kSage2Weight], w[kSage2Bias]);
  tr.d2 = relu(tr.z2);
  if (tr.dropout) {
    tr.mask2 = dropout_mask(tr.d2.rows(), tr.d2.cols(), m.dropout, rng);
    apply_mask(tr.d2, tr.mask2);
  }
  tr.logits = affine(tr.d2, w[kSageHeadWeight], w[kSageHeadBias]);
  return tr;
}

std::size_t count_split(const MetaGraph &mg, NodeSplit which) {
  return static_cast<std::size_t>(std::count(mg.split.begin(), mg.split.end(), which));
}

double masked_loss(const MetaGraph &mg, const Matrix &logits, NodeSplit which,
                   Matrix *dlogits) {
  const std::size_t count = count_split(mg, which);
  if (count == 0) {
    throw Error(ErrorCode::kDegenerateSplit,
                "no nodes in the " + std::string(node_split_name(which)) + " split");
  }
  const double inv = 1.0 / static_cast<double>(count);
  double loss = 0.0;
  if (dlogits != nullptr) {
    *dlogits = Matrix(logits.rows(), 2);
  }
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (mg.split[i] != which) {
      continue;
    }
    double d[2];
    loss += softmax_xent(logits.row(i).data(), mg.labels[i], d);
    if (dlogits != nullptr) {
      (*dlogits)(i, 0) = d[0] * inv;
      (*dlogits)(i, 1) = d[1] * inv;
    }
  }
  return loss * inv;
}

// Splits dc = [d_self | d_agg] into d_self + P^T d_agg.
Matrix through_concat(const Matrix &dc, const Matrix &p, std::size_t width) {
  Matrix self(dc.rows(), width), agg(dc.rows(), width);
  for (std::size_t i = 0; i < dc.rows(); ++i) {
    std::copy(dc.row(i).begin(), dc.row(i).begin() + width, self.row(i).begin());
    std::copy(dc.row(i).begin() + width, dc.row(i).end(), agg.row(i).begin());
  }
  return self + matmul_tn(p, agg);
}

void backward(const Trace &tr, const SageModel &m, const Matrix &dlogits, TensorList &grad) {
  const auto &w = m.params;
  Matrix d;
  affine_backward(tr.d2, w[kSageHeadWeight], dlogits, grad[kSageHeadWeight],
                  grad[kSageHeadBias], &d);
  if (tr.dropout) {
    apply_mask(d, tr.mask2);
  }
  relu_backward(tr.z2, d);
  Matrix dc2;
  affine_backward(tr.c2, w[kSage2Weight], d, grad[kSage2Weight], grad[kSage2Bias], &dc2);
  d = through_concat(dc2, tr.p, kSageHidden1);
  if (tr.dropout) {
    apply_mask(d, tr.mask1);
  }
  relu_backward(tr.z1, d);
  affine_backward(tr.c1, w[kSage1Weight], d, grad[kSage1Weight], grad[kSage1Bias], nullptr);
}

}  // namespace

SageModel sage_init(std::size_t features, std::uint64_t seed) {
  SageModel m;
  m.params = sage_shapes(features);
  m.input_mean.assign(features, 0.0);
  m.input_scale.assign(features, 1.0);
  Rng rng(seed);
  for (std::size_t t = 0; t < kSageTensorCount; t += 2) {
    init_dense(m.params[t], m.params[t + 1], rng);
  }
  return m;
}

Matrix sage_forward(const MetaGraph &mg, const SageModel &model, bool dropout_active,
                    std::uint64_t seed) {
  return forward(mg, model, dropout_active, seed).logits;
}

double sage_loss(const MetaGraph &mg, const SageModel &model, NodeSplit which,
                 TensorList *grad, bool dropout_active, std::uint64_t seed) {
  const Trace tr = forward(mg, model, dropout_active, seed);
  Matrix dlogits;
  const double loss = masked_loss(mg, tr.logits, which, grad != nullptr ? &dlogits : nullptr);
  if (grad != nullptr) {
    backward(tr, model, dlogits, *grad);
  }
  return loss;
}

std::vector<double> sage_predict(const MetaGraph &mg, const SageModel &model) {
  const Matrix logits = sage_forward(mg, model, false);
  std::vector<double> p(logits.rows());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = softmax2(logits.row(i).data())[1];
  }
  return p;
}

void sage_standardize(const MetaGraph &mg, SageModel &model) {
  const std::size_t f = mg.features.cols();
  std::size_t count = 0;
  std::vector<double> sum(f, 0.0), sq(f, 0.0);
  for (std::size_t i = 0; i < mg.size(); ++i) {
    if (mg.split[i] == NodeSplit::kTrain) {
      ++count;
      for (std::size_t c = 0; c < f; ++c) {
        sum[c] += mg.features(i, c);
      }
    }
  }
  if (count == 0 || model.input_dim() != f) {
    throw Error(count == 0 ? ErrorCode::kDegenerateSplit : ErrorCode::kShapeMismatch,
                "cannot standardize SAGE inputs from this meta-graph");
  }
  for (std::size_t c = 0; c < f; ++c) {
    model.input_mean[c] = sum[c] / static_cast<double>(count);
  }
  for (std::size_t i = 0; i < mg.size(); ++i) {
    if (mg.split[i] == NodeSplit::kTrain) {
      for (std::size_t c = 0; c < f; ++c) {
        const double d = mg.features(i, c) - model.input_mean[c];
        sq[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < f; ++c) {
    const double sd = std::sqrt(sq[c] / static_cast<double>(count));
    model.input_scale[c] = sd > 1e-12 ? sd : 1.0;
  }
}

SageModel train_sage(const MetaGraph &mg, const SageConfig &cfg, TrainLog *log) {
  if (cfg.epochs < 1 || !(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
    throw Error(ErrorCode::kConfigError, "epochs must be >= 1 and dropout in [0, 1)");
  }
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < mg.size(); ++i) {
    if (mg.split[i] == NodeSplit::kTrain) {
      (mg.labels[i] == 1 ? has1 : has0) = true;
    }
  }
  if (!has0 || !has1) {
    throw Error(ErrorCode::kDegenerateLabels, "training nodes must cover both classes");
  }

  const std::size_t f = mg.features.cols();
  SageModel model = sage_init(f, cfg.seed);
  model.dropout = cfg.dropout;
  sage_standardize(mg, model);

  const bool has_val = count_split(mg, NodeSplit::kVal) > 0;
  Adam adam(model.params, cfg.adam);
  TrainLog local;
  SageModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    TensorList grad = zeros_like(model.params);
    const std::uint64_t seed = cfg.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(epoch);
    const double train_loss = sage_loss(mg, model, NodeSplit::kTrain, &grad, true, seed);
    adam.step(model.params, grad);
    const double val_loss =
        has_val ? sage_loss(mg, model, NodeSplit::kVal) : std::numeric_limits<double>::quiet_NaN();
    local.epochs.push_back({ epoch, train_loss, val_loss });
    if (!has_val) {
      best = model;
      local.best_epoch = epoch;
      continue;
    }
    if (val_loss < best_loss) {
      best_loss = val_loss;
      best = model;
      local.best_epoch = epoch;
    } else if (cfg.patience >= 0 && epoch - local.best_epoch > cfg.patience) {
      break;
    }
  }
  local.best_val_loss = best_loss;
  if (log != nullptr) {
    *log = std::move(local);
  }
  return best;
}

void save_sage(const std::filesystem::path &path, const SageModel &model) {
  using U = std::uint32_t;
  TensorList all = model.params;
  Tensor mean("input.mean", { U(model.input_dim()) });
  mean.values = model.input_mean;
  Tensor scale("input.scale", { U(model.input_dim()) });
  scale.values = model.input_scale;
  Tensor drop("dropout", { 1 });
  drop.values[0] = model.dropout;
  all.push_back(std::move(mean));
  all.push_back(std::move(scale));
  all.push_back(std::move(drop));
  write_tensors(path, all);
}

SageModel load_sage(const std::filesystem::path &path) {
  // The input width is read from the first tensor's shape.
  const TensorList probe = read_tensors(path);
  if (probe.empty() || probe[0].shape.size() != 2 || probe[0].shape[1] % 2 != 0) {
    throw Error(ErrorCode::kFormatError, path.string() + ": not a SAGE parameter file");
  }
  const std::size_t f = probe[0].shape[1] / 2;
  using U = std::uint32_t;
  TensorList expected = sage_shapes(f);
  expected.emplace_back("input.mean", std::vector<U> { U(f) });
  expected.emplace_back("input.scale", std::vector<U> { U(f) });
  expected.emplace_back("dropout", std::vector<U> { 1 });
  TensorList all = read_tensors(path, std::move(expected));
  SageModel m;
  m.params.assign(all.begin(), all.begin() + kSageTensorCount);
  m.input_mean = all[kSageTensorCount].values;
  m.input_scale = all[kSageTensorCount + 1].values;
  m.dropout = all[kSageTensorCount + 2].values[0];
  return m;
}

namespace {

bool same_signs(const Matrix &a, const Matrix &b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a.data()[i] > 0.0) != (b.data()[i] > 0.0)) {
      return false;
    }
  }
  return true;
}

// Change of relu at z = base + dz, exact where no sign flips.
double relu_change(double base, double dz, bool &kink) {
  const double z = base + dz;
  if ((z > 0.0) != (base > 0.0)) {
    kink = true;
    return std::max(z, 0.0) - std::max(base, 0.0);
  }
  return base > 0.0 ? dz : 0.0;
}

// Change of the logits after moving entry (o, j) of tensor t by delta,
// carried as differences from the base trace so rounding scales with the
// change. Only column o of the perturbed layer moves, so its effect on the
// next layer is rank one (rank two through the aggregation branch).
// Sets kink when any ReLU input changes sign.
class Perturber {
public:
  Perturber(const SageModel &m, const Trace &base) : m_(m), base_(base) {
    const Tensor &w2 = m.params[kSage2Weight];
    const Tensor &head = m.params[kSageHeadWeight];
    const std::size_t n = base.z1.rows();
    wt2_ = Matrix(w2.cols(), w2.rows());
    for (std::size_t q = 0; q < w2.rows(); ++q) {
      for (std::size_t c = 0; c < w2.cols(); ++c) {
        wt2_(c, q) = w2.values[q * w2.cols() + c];
      }
    }
    // Unit o of layer 1 reaches z2 row r through two columns of sage2
    // (self a, aggregated b). While no z2 sign flips, the logit change of
    // row r is d a.h + pd b.h summed over the active units; the ratios bound
    // how far d and pd can go before a flip is possible.
    rows_.resize(kSageHidden1 * n);
    for (std::size_t o = 0; o < kSageHidden1; ++o) {
      const double *wa = wt2_.row(o).data();
      const double *wb = wt2_.row(kSageHidden1 + o).data();
      for (std::size_t r = 0; r < n; ++r) {
        RowSums &rs = rows_[o * n + r];
        for (std::size_t q = 0; q < kSageHidden2; ++q) {
          const double z = base.z2(r, q);
          if (z > 0.0) {
            rs.a[0] += wa[q] * head.values[q];
            rs.a[1] += wa[q] * head.values[head.cols() + q];
            rs.b[0] += wb[q] * head.values[q];
            rs.b[1] += wb[q] * head.values[head.cols() + q];
          }
          const double mag = std::abs(z);
          rs.ra = std::max(rs.ra, mag > 0.0 ? std::abs(wa[q]) / mag : INFINITY);
          rs.rb = std::max(rs.rb, mag > 0.0 ? std::abs(wb[q]) / mag : INFINITY);
        }
      }
    }
  }

  void logits_change(std::size_t t, std::size_t index, double delta, Matrix &dlogits,
                     bool &kink) const {
    const auto &w = m_.params;
    const bool weight = w[t].shape.size() == 2;
    const std::size_t o = weight ? index / w[t].cols() : index;
    const std::size_t j = weight ? index % w[t].cols() : 0;
    const std::size_t n = base_.z1.rows();
    auto input = [&](const Matrix &c, std::size_t r) { return weight ? c(r, j) : 1.0; };
    const Tensor &head = w[kSageHeadWeight];
    if (t == kSage1Weight || t == kSage1Bias) {
      std::vector<double> d(n), pd(n, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        d[r] = relu_change(base_.z1(r, o), delta * input(base_.c1, r), kink);
      }
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = 0; s < n; ++s) {
          pd[r] += base_.p(r, s) * d[s];
        }
      }
      for (std::size_t r = 0; r < n; ++r) {
        const RowSums &rs = rows_[o * n + r];
        const double reach = (d[r] != 0.0 ? std::abs(d[r]) * rs.ra : 0.0) +
                             (pd[r] != 0.0 ? std::abs(pd[r]) * rs.rb : 0.0);
        if (reach < 1.0) {
          dlogits(r, 0) = d[r] * rs.a[0] + pd[r] * rs.b[0];
          dlogits(r, 1) = d[r] * rs.a[1] + pd[r] * rs.b[1];
          continue;
        }
        const double *wa = wt2_.row(o).data();
        const double *wb = wt2_.row(kSageHidden1 + o).data();
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t q = 0; q < kSageHidden2; ++q) {
          const double da = relu_change(base_.z2(r, q), d[r] * wa[q] + pd[r] * wb[q], kink);
          l0 += da * head.values[q];
          l1 += da * head.values[head.cols() + q];
        }
        dlogits(r, 0) = l0;
        dlogits(r, 1) = l1;
      }
      return;
    }
    if (t == kSage2Weight || t == kSage2Bias) {
      for (std::size_t r = 0; r < n; ++r) {
        const double da = relu_change(base_.z2(r, o), delta * input(base_.c2, r), kink);
        dlogits(r, 0) = da * head.values[o];
        dlogits(r, 1) = da * head.values[head.cols() + o];
      }
      return;
    }
    for (std::size_t r = 0; r < n; ++r) {
      dlogits(r, 0) = o == 0 ? delta * input(base_.d2, r) : 0.0;
      dlogits(r, 1) = o == 1 ? delta * input(base_.d2, r) : 0.0;
    }
  }

private:
  struct RowSums {
    double a[2] = { 0.0, 0.0 }, b[2] = { 0.0, 0.0 };
    double ra = 0.0, rb = 0.0;
  };
  const SageModel &m_;
  const Trace &base_;
  Matrix wt2_;
  std::vector<RowSums> rows_;
};

}  // namespace

GradCheckResult sage_grad_check(const MetaGraph &mg, const SageModel &model,
                                const GradCheckOptions &opt) {
  const Trace base = forward(mg, model, false, 0);
  Matrix dlogits;
  masked_loss(mg, base.logits, NodeSplit::kTrain, &dlogits);
  TensorList grad = zeros_like(model.params);
  backward(base, model, dlogits, grad);

  SageModel m = model;
  Trace tr = base;
  Matrix dl(base.logits.rows(), 2);
  std::vector<std::array<double, 2>> probs;
  for (std::size_t r = 0; r < base.logits.rows(); ++r) {
    probs.push_back(softmax2(base.logits.row(r).data()));
  }
  const Perturber perturb(model, base);
  const double inv = 1.0 / static_cast<double>(count_split(mg, NodeSplit::kTrain));
  GradCheckResult res;
  res.numeric = zeros_like(model.params);
  for (std::size_t t = 0; t < m.params.size(); ++t) {
    auto &vals = m.params[t].values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      bool kink = false;
      // Loss change from the base point; the base loss cancels in the
      // central difference.
      auto loss_at = [&](double delta) {
        if (opt.full_forward) {
          vals[i] = saved + delta;
          tr = forward(mg, m, false, 0);
          vals[i] = saved;
          kink = kink || !same_signs(tr.z1, base.z1) || !same_signs(tr.z2, base.z2);
          return masked_loss(mg, tr.logits, NodeSplit::kTrain, nullptr);
        }
        perturb.logits_change(t, i, delta, dl, kink);
        double change = 0.0;
        for (std::size_t r = 0; r < dl.rows(); ++r) {
          if (mg.split[r] == NodeSplit::kTrain && (dl(r, 0) != 0.0 || dl(r, 1) != 0.0)) {
            change += softmax_xent_change(probs[r], mg.labels[r], dl.row(r).data());
          }
        }
        return change * inv;
      };
      auto central = [&](double h) { return (loss_at(h) - loss_at(-h)) / (2.0 * h); };
      double numeric = central(opt.h);
      if (opt.richardson) {
        numeric = (4.0 * central(0.5 * opt.h) - numeric) / 3.0;
      }
      if (kink) {
        res.numeric[t].values[i] = std::numeric_limits<double>::quiet_NaN();
        ++res.excluded;
        continue;
      }
      res.numeric[t].values[i] = numeric;
      const double analytic = grad[t].values[i];
      const double abs_err = std::abs(numeric - analytic);
      const double rel = abs_err /
          std::max({ std::abs(numeric), std::abs(analytic), opt.floor });
      res.max_abs_error = std::max(res.max_abs_error, abs_err);
      if (rel > res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst = m.params[t].name + "[" + std::to_string(i) + "]";
      }
      ++res.checked;
    }
  }
  return res;
}

}  // namespace geoscatt
