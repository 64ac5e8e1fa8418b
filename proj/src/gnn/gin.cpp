// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/gnn/gin.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/io/formats.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

namespace {

std::size_t w1(std::size_t l) { return 4 * l; }
std::size_t b1(std::size_t l) { return 4 * l + 1; }
std::size_t w2(std::size_t l) { return 4 * l + 2; }
std::size_t b2(std::size_t l) { return 4 * l + 3; }

TensorList gin_shapes() {
  using U = std::uint32_t;
  TensorList t;
  for (std::size_t l = 0; l < kGinLayers; ++l) {
    const U in = l == 0 ? static_cast<U>(kNodeFeatureCount) : U(kGinHidden);
    const std::string p = "gin" + std::to_string(l);
    t.emplace_back(p + ".mlp1.weight", std::vector<U> { U(kGinHidden), in });
    t.emplace_back(p + ".mlp1.bias", std::vector<U> { U(kGinHidden) });
    t.emplace_back(p + ".mlp2.weight", std::vector<U> { U(kGinHidden), U(kGinHidden) });
    t.emplace_back(p + ".mlp2.bias", std::vector<U> { U(kGinHidden) });
  }
  t.emplace_back("post1.weight", std::vector<U> { U(kGinEmbedding), U(kGinHidden) });
  t.emplace_back("post1.bias", std::vector<U> { U(kGinEmbedding) });
  t.emplace_back("post2.weight", std::vector<U> { U(kGinEmbedding), U(kGinEmbedding) });
  t.emplace_back("post2.bias", std::vector<U> { U(kGinEmbedding) });
  t.emplace_back("head.weight", std::vector<U> { 2, U(kGinEmbedding) });
  t.emplace_back("head.bias", std::vector<U> { 2 });
  return t;
}

using Neighbours = std::vector<std::vector<int>>;

Neighbours neighbours_of(const MolecularGraph &g) {
  Neighbours nb(g.atom_count());
  for (const auto &b: g.bonds) {
    nb[b.begin].push_back(b.end);
    nb[b.end].push_back(b.begin);
  }
  return nb;
}

// (1 + eps) h + sum over neighbours.
Matrix aggregate(const Matrix &h, const Neighbours &nb, double eps) {
  Matrix out = (1.0 + eps) * h;
  for (std::size_t v = 0; v < nb.size(); ++v) {
    double *o = out.row(v).data();
    for (int u: nb[v]) {
      const double *hu = h.row(u).data();
      for (std::size_t c = 0; c < h.cols(); ++c) {
        o[c] += hu[c];
      }
    }
  }
  return out;
}

struct Trace {
  std::array<Matrix, kGinLayers + 1> h;
  std::array<Matrix, kGinLayers> agg, z1, a1, z2;
  Matrix pooled, zp, ap, emb, ae, logits;
};

void check_model(const GinModel &m) {
  const auto shapes = gin_shapes();
  if (m.params.size() != shapes.size()) {
    throw Error(ErrorCode::kShapeMismatch, "GIN model has the wrong tensor count");
  }
  for (std::size_t t = 0; t < shapes.size(); ++t) {
    if (m.params[t].shape != shapes[t].shape) {
      throw Error(ErrorCode::kShapeMismatch,
                  "GIN tensor '" + shapes[t].name + "' has the wrong shape");
    }
  }
  if (m.input_mean.size() != kNodeFeatureCount ||
      m.input_scale.size() != kNodeFeatureCount) {
    throw Error(ErrorCode::kShapeMismatch, "GIN input standardization has the wrong length");
  }
}

Matrix standardized(const MolecularGraph &g, const GinModel &m) {
  if (g.node_features.cols() != kNodeFeatureCount ||
      g.node_features.rows() != g.atom_count()) {
    throw Error(ErrorCode::kShapeMismatch, "node feature matrix is not N x 7");
  }
  Matrix x = g.node_features;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      x(i, c) = (x(i, c) - m.input_mean[c]) / m.input_scale[c];
    }
  }
  return x;
}

// Recomputes everything from GIN layer `from` on (kGinLayers = readout and
// post layers only); earlier entries of tr must already be filled.
void run_from(std::size_t from, const Neighbours &nb, const GinModel &m, Trace &tr) {
  const auto &p = m.params;
  for (std::size_t l = from; l < kGinLayers; ++l) {
    tr.agg[l] = aggregate(tr.h[l], nb, m.eps[l]);
    tr.z1[l] = affine(tr.agg[l], p[w1(l)], p[b1(l)]);
    tr.a1[l] = relu(tr.z1[l]);
    tr.z2[l] = affine(tr.a1[l], p[w2(l)], p[b2(l)]);
    tr.h[l + 1] = relu(tr.z2[l]);
  }
  const Matrix &hl = tr.h[kGinLayers];
  tr.pooled = Matrix(1, kGinHidden);
  for (std::size_t v = 0; v < hl.rows(); ++v) {
    for (std::size_t c = 0; c < kGinHidden; ++c) {
      tr.pooled(0, c) += hl(v, c);
    }
  }
  if (m.readout == Readout::kMean && hl.rows() > 0) {
    tr.pooled = (1.0 / static_cast<double>(hl.rows())) * tr.pooled;
  }
  tr.zp = affine(tr.pooled, p[kGinPost1Weight], p[kGinPost1Bias]);
  tr.ap = relu(tr.zp);
  tr.emb = affine(tr.ap, p[kGinPost2Weight], p[kGinPost2Bias]);
  tr.ae = relu(tr.emb);
  tr.logits = affine(tr.ae, p[kGinHeadWeight], p[kGinHeadBias]);
}

Trace forward(const MolecularGraph &g, const Neighbours &nb, const GinModel &m) {
  check_model(m);
  Trace tr;
  tr.h[0] = standardized(g, m);
  run_from(0, nb, m, tr);
  return tr;
}

void backward(const Trace &tr, const Neighbours &nb, const GinModel &m,
              const double *dlogits, TensorList &grad) {
  const auto &p = m.params;
  Matrix d(1, 2, { dlogits[0], dlogits[1] });
  Matrix dx;
  affine_backward(tr.ae, p[kGinHeadWeight], d, grad[kGinHeadWeight], grad[kGinHeadBias], &dx);
  relu_backward(tr.emb, dx);
  d = std::move(dx);
  affine_backward(tr.ap, p[kGinPost2Weight], d, grad[kGinPost2Weight], grad[kGinPost2Bias], &dx);
  relu_backward(tr.zp, dx);
  d = std::move(dx);
  affine_backward(tr.pooled, p[kGinPost1Weight], d, grad[kGinPost1Weight], grad[kGinPost1Bias], &dx);

  const std::size_t n = tr.h[0].rows();
  const double pool_scale =
      m.readout == Readout::kMean && n > 0 ? 1.0 / static_cast<double>(n) : 1.0;
  Matrix dh(n, kGinHidden);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t c = 0; c < kGinHidden; ++c) {
      dh(v, c) = pool_scale * dx(0, c);
    }
  }
  for (std::size_t l = kGinLayers; l-- > 0;) {
    relu_backward(tr.z2[l], dh);
    Matrix da;
    affine_backward(tr.a1[l], p[w2(l)], dh, grad[w2(l)], grad[b2(l)], &da);
    relu_backward(tr.z1[l], da);
    if (l == 0) {
      affine_backward(tr.agg[l], p[w1(l)], da, grad[w1(l)], grad[b1(l)], nullptr);
      break;
    }
    Matrix dagg;
    affine_backward(tr.agg[l], p[w1(l)], da, grad[w1(l)], grad[b1(l)], &dagg);
    // The adjacency is symmetric, so the transpose of aggregate is aggregate.
    dh = aggregate(dagg, nb, m.eps[l]);
  }
}

double loss_of(const Trace &tr, int label) {
  return softmax_xent(tr.logits.row(0).data(), label, nullptr);
}

void check_label(int label) {
  if (label != 0 && label != 1) {
    throw Error(ErrorCode::kDegenerateLabels, "labels must be 0 or 1");
  }
}

}  // namespace

GinModel gin_zeros() {
  GinModel m;
  m.params = gin_shapes();
  return m;
}

GinModel gin_init(std::uint64_t seed) {
  GinModel m = gin_zeros();
  Rng rng(seed);
  for (std::size_t t = 0; t < kGinTensorCount; t += 2) {
    init_dense(m.params[t], m.params[t + 1], rng);
  }
  return m;
}

GinOutput gin_forward(const MolecularGraph &g, const GinModel &model) {
  const auto nb = neighbours_of(g);
  const Trace tr = forward(g, nb, model);
  GinOutput out;
  out.embedding.assign(tr.emb.data().begin(), tr.emb.data().end());
  out.logits = { tr.logits(0, 0), tr.logits(0, 1) };
  return out;
}

double gin_loss(const MolecularGraph &g, int label, const GinModel &model,
                TensorList *grad) {
  check_label(label);
  const auto nb = neighbours_of(g);
  const Trace tr = forward(g, nb, model);
  double dlogits[2];
  const double loss = softmax_xent(tr.logits.row(0).data(), label, dlogits);
  if (grad != nullptr) {
    backward(tr, nb, model, dlogits, *grad);
  }
  return loss;
}

Matrix gin_embeddings(const std::vector<MolecularGraph> &graphs,
                      const GinModel &model, unsigned threads) {
  check_model(model);
  Matrix out(graphs.size(), kGinEmbedding);
  parallel_for(graphs.size(), threads, [&](std::size_t i) {
    const auto e = gin_forward(graphs[i], model).embedding;
    std::copy(e.begin(), e.end(), out.row(i).begin());
  });
  return out;
}

namespace {

// Fixed-size chunks reduced in index order, so the summed gradient does not
// depend on the thread count.
constexpr std::size_t kChunk = 8;
constexpr std::size_t kChunksInFlight = 16;

double batch_loss_grad(const LabeledGraphs &data, const std::vector<std::size_t> &idx,
                       const GinModel &m, unsigned threads, TensorList *grad) {
  const std::size_t chunks = (idx.size() + kChunk - 1) / kChunk;
  double loss = 0.0;
  std::vector<TensorList> partial(std::min(chunks, kChunksInFlight));
  std::vector<double> partial_loss(partial.size());
  for (std::size_t start = 0; start < chunks; start += kChunksInFlight) {
    const std::size_t count = std::min(kChunksInFlight, chunks - start);
    parallel_for(count, threads, [&](std::size_t k) {
      TensorList &g = partial[k];
      if (grad != nullptr) {
        g = zeros_like(m.params);
      }
      double s = 0.0;
      const std::size_t lo = (start + k) * kChunk;
      const std::size_t hi = std::min(idx.size(), lo + kChunk);
      for (std::size_t i = lo; i < hi; ++i) {
        s += gin_loss(data.graphs[idx[i]], data.labels[idx[i]], m,
                      grad != nullptr ? &g : nullptr);
      }
      partial_loss[k] = s;
    });
    for (std::size_t k = 0; k < count; ++k) {
      loss += partial_loss[k];
      if (grad != nullptr) {
        accumulate(*grad, partial[k]);
      }
    }
  }
  return loss;
}

void check_split(const LabeledGraphs &d, const char *name) {
  if (d.graphs.empty() || d.graphs.size() != d.labels.size()) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::string(name) + " split is empty or has mismatched labels");
  }
  for (int y: d.labels) {
    check_label(y);
  }
}

}  // namespace

GinModel train_gin(const LabeledGraphs &train, const LabeledGraphs &val,
                   const TrainConfig &cfg, TrainLog *log) {
  check_split(train, "training");
  check_split(val, "validation");
  const auto pos = std::count(train.labels.begin(), train.labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(train.labels.size())) {
    throw Error(ErrorCode::kDegenerateLabels, "training split has a single class");
  }
  if (cfg.epochs < 1 || !(cfg.adam.lr >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "epochs must be >= 1 and lr >= 0");
  }

  GinModel model = gin_init(cfg.seed);
  model.readout = cfg.readout;
  std::vector<double> sum(kNodeFeatureCount, 0.0), sq(kNodeFeatureCount, 0.0);
  std::size_t nodes = 0;
  for (const auto &g: train.graphs) {
    for (std::size_t i = 0; i < g.node_features.rows(); ++i) {
      for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
        sum[c] += g.node_features(i, c);
      }
      ++nodes;
    }
  }
  for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
    model.input_mean[c] = nodes > 0 ? sum[c] / static_cast<double>(nodes) : 0.0;
  }
  for (const auto &g: train.graphs) {
    for (std::size_t i = 0; i < g.node_features.rows(); ++i) {
      for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
        const double d = g.node_features(i, c) - model.input_mean[c];
        sq[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
    const double sd = nodes > 0 ? std::sqrt(sq[c] / static_cast<double>(nodes)) : 0.0;
    model.input_scale[c] = sd > 1e-12 ? sd : 1.0;
  }

  Adam adam(model.params, cfg.adam);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train.graphs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> val_idx(val.graphs.size());
  std::iota(val_idx.begin(), val_idx.end(), 0);
  const std::size_t batch =
      cfg.batch_size == 0 ? order.size() : std::min(cfg.batch_size, order.size());

  TrainLog local;
  GinModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (batch < order.size()) {
      rng.shuffle(std::span(order));
    }
    double train_loss = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += batch) {
      const std::vector<std::size_t> idx(order.begin() + lo,
                                         order.begin() + std::min(order.size(), lo + batch));
      TensorList grad = zeros_like(model.params);
      train_loss += batch_loss_grad(train, idx, model, cfg.threads, &grad);
      const double inv = 1.0 / static_cast<double>(idx.size());
      for (auto &t: grad) {
        for (double &v: t.values) {
          v *= inv;
        }
      }
      adam.step(model.params, grad);
    }
    train_loss /= static_cast<double>(order.size());
    const double val_loss =
        batch_loss_grad(val, val_idx, model, cfg.threads, nullptr) /
        static_cast<double>(val_idx.size());
    local.epochs.push_back({ epoch, train_loss, val_loss });
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

void save_gin(const std::filesystem::path &path, const GinModel &model) {
  check_model(model);
  using U = std::uint32_t;
  TensorList all = model.params;
  Tensor mean("input.mean", { U(kNodeFeatureCount) });
  mean.values = model.input_mean;
  Tensor scale("input.scale", { U(kNodeFeatureCount) });
  scale.values = model.input_scale;
  Tensor eps("gin.eps", { U(kGinLayers) });
  eps.values.assign(model.eps.begin(), model.eps.end());
  Tensor readout("readout", { 1 });
  readout.values[0] = model.readout == Readout::kMean ? 1.0 : 0.0;
  all.push_back(std::move(mean));
  all.push_back(std::move(scale));
  all.push_back(std::move(eps));
  all.push_back(std::move(readout));
  write_tensors(path, all);
}

GinModel load_gin(const std::filesystem::path &path) {
  using U = std::uint32_t;
  TensorList expected = gin_shapes();
  expected.emplace_back("input.mean", std::vector<U> { U(kNodeFeatureCount) });
  expected.emplace_back("input.scale", std::vector<U> { U(kNodeFeatureCount) });
  expected.emplace_back("gin.eps", std::vector<U> { U(kGinLayers) });
  expected.emplace_back("readout", std::vector<U> { 1 });
  TensorList all = read_tensors(path, std::move(expected));
  GinModel m;
  m.params.assign(all.begin(), all.begin() + kGinTensorCount);
  m.input_mean = all[kGinTensorCount].values;
  m.input_scale = all[kGinTensorCount + 1].values;
  std::copy(all[kGinTensorCount + 2].values.begin(), all[kGinTensorCount + 2].values.end(),
            m.eps.begin());
  m.readout = all[kGinTensorCount + 3].values[0] != 0.0 ? Readout::kMean : Readout::kSum;
  for (double s: m.input_scale) {
    if (!(s > 0.0)) {
      throw Error(ErrorCode::kFormatError, path.string() + ": input scale must be positive");
    }
  }
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

bool same_pattern(const Trace &a, const Trace &b, std::size_t from) {
  for (std::size_t l = from; l < kGinLayers; ++l) {
    if (!same_signs(a.z1[l], b.z1[l]) || !same_signs(a.z2[l], b.z2[l])) {
      return false;
    }
  }
  return same_signs(a.zp, b.zp) && same_signs(a.emb, b.emb);
}

// Change of relu(z) when z = base moves by dz. Exact where no sign flips.
Matrix relu_change(const Matrix &base, const Matrix &dz, bool &kink) {
  Matrix da(dz.rows(), dz.cols());
  for (std::size_t i = 0; i < dz.size(); ++i) {
    const double zb = base.data()[i], d = dz.data()[i];
    if (d == 0.0) {
      continue;
    }
    const double z = zb + d;
    if ((z > 0.0) != (zb > 0.0)) {
      kink = true;
      da.data()[i] = std::max(z, 0.0) - std::max(zb, 0.0);
    } else if (zb > 0.0) {
      da.data()[i] = d;
    }
  }
  return da;
}

// dx W^T for W stored transposed (wt = W^T), skipping zero entries of dx.
Matrix linear_change(const Matrix &dx, const Matrix &wt) {
  const auto &k = simd::kernels();
  Matrix dy(dx.rows(), wt.cols());
  for (std::size_t r = 0; r < dx.rows(); ++r) {
    for (std::size_t c = 0; c < dx.cols(); ++c) {
      if (dx(r, c) != 0.0) {
        k.axpy(dx(r, c), wt.row(c).data(), dy.row(r).data(), wt.cols());
      }
    }
  }
  return dy;
}

Matrix transposed(const Tensor &w) {
  Matrix t(w.cols(), w.rows());
  for (std::size_t o = 0; o < w.rows(); ++o) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      t(c, o) = w.values[o * w.cols() + c];
    }
  }
  return t;
}

// Change of the logits when entry `index` of tensor t moves by delta,
// propagated as differences from the base trace so that rounding scales
// with the change instead of with the activations. Sets kink when any
// ReLU input changes sign.
struct Perturber {
  const Neighbours &nb;
  const GinModel &m;
  const Trace &base;
  std::vector<Matrix> wt;

  Perturber(const Neighbours &nb_, const GinModel &m_, const Trace &base_)
      : nb(nb_), m(m_), base(base_) {
    for (const auto &t: m.params) {
      wt.push_back(t.shape.size() == 2 ? transposed(t) : Matrix());
    }
  }

  Matrix from_emb(const Matrix &demb, bool &kink) const {
    return linear_change(relu_change(base.emb, demb, kink), wt[kGinHeadWeight]);
  }

  Matrix from_zp(const Matrix &dzp, bool &kink) const {
    return from_emb(linear_change(relu_change(base.zp, dzp, kink), wt[kGinPost2Weight]), kink);
  }

  Matrix from_z2(std::size_t l, const Matrix &dz2, bool &kink) const {
    Matrix dh = relu_change(base.z2[l], dz2, kink);
    for (std::size_t n = l + 1; n < kGinLayers; ++n) {
      const Matrix dz1 = linear_change(aggregate(dh, nb, m.eps[n]), wt[w1(n)]);
      const Matrix dz = linear_change(relu_change(base.z1[n], dz1, kink), wt[w2(n)]);
      dh = relu_change(base.z2[n], dz, kink);
    }
    Matrix dp(1, kGinHidden);
    for (std::size_t v = 0; v < dh.rows(); ++v) {
      for (std::size_t c = 0; c < kGinHidden; ++c) {
        dp(0, c) += dh(v, c);
      }
    }
    if (m.readout == Readout::kMean && dh.rows() > 0) {
      dp = (1.0 / static_cast<double>(dh.rows())) * dp;
    }
    return from_zp(linear_change(dp, wt[kGinPost1Weight]), kink);
  }

  Matrix logits_change(std::size_t t, std::size_t index, double delta, bool &kink) const {
    const auto &p = m.params;
    const bool weight = p[t].shape.size() == 2;
    const std::size_t o = weight ? index / p[t].cols() : index;
    const std::size_t j = weight ? index % p[t].cols() : 0;
    // Column o of the perturbed map's output moves by delta * input column j.
    auto column = [&](const Matrix &input) {
      Matrix dz(input.rows(), p[t].rows());
      for (std::size_t r = 0; r < input.rows(); ++r) {
        dz(r, o) = delta * (weight ? input(r, j) : 1.0);
      }
      return dz;
    };
    if (t < 4 * kGinLayers) {
      const std::size_t l = t / 4;
      if (t == w1(l) || t == b1(l)) {
        const Matrix da = relu_change(base.z1[l], column(base.agg[l]), kink);
        return from_z2(l, linear_change(da, wt[w2(l)]), kink);
      }
      return from_z2(l, column(base.a1[l]), kink);
    }
    if (t == kGinPost1Weight || t == kGinPost1Bias) {
      return from_zp(column(base.pooled), kink);
    }
    if (t == kGinPost2Weight || t == kGinPost2Bias) {
      return from_emb(column(base.ap), kink);
    }
    return column(base.ae);
  }
};

}  // namespace

GradCheckResult gin_grad_check(const GinModel &model, const MolecularGraph &g,
                               int label, const GradCheckOptions &opt) {
  check_label(label);
  const auto nb = neighbours_of(g);
  const Trace base = forward(g, nb, model);
  TensorList grad = zeros_like(model.params);
  double dlogits[2];
  softmax_xent(base.logits.row(0).data(), label, dlogits);
  backward(base, nb, model, dlogits, grad);

  GinModel m = model;
  Trace tr = base;
  const Perturber perturb(nb, model, base);
  GradCheckResult res;
  res.numeric = zeros_like(model.params);
  for (std::size_t t = 0; t < m.params.size(); ++t) {
    const std::size_t from = t < 4 * kGinLayers ? t / 4 : kGinLayers;
    tr = base;
    auto &vals = m.params[t].values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      bool kink = false;
      // Loss change from the base point; the base loss cancels in the
      // central difference.
      auto loss_at = [&](double delta) {
        if (opt.full_forward) {
          vals[i] = saved + delta;
          run_from(from, nb, m, tr);
          vals[i] = saved;
          kink = kink || !same_pattern(tr, base, from);
          return loss_of(tr, label);
        }
        const Matrix dl = perturb.logits_change(t, i, delta, kink);
        return softmax_xent_change(base.logits.row(0).data(), label, dl.row(0).data());
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
