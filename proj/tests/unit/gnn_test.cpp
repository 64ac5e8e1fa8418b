// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "geoscatt/common/error.hpp"
#include "geoscatt/gnn/gin.hpp"
#include "geoscatt/ingest/smiles.hpp"
#include "support/corpus.hpp"

namespace geoscatt {
namespace {

// Every map passes its inputs through unchanged (zero-padded where it
// widens), so a network of non-negative inputs computes plain sums.
GinModel identity_model() {
  GinModel m = gin_zeros();
  for (auto &t: m.params) {
    if (t.shape.size() == 2) {
      for (std::size_t i = 0; i < std::min(t.rows(), t.cols()); ++i) {
        t.values[i * t.cols() + i] = 1.0;
      }
    }
  }
  return m;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), {} };
}

TEST(GinTest, ParameterLayout) {
  const GinModel m = gin_init(1);
  ASSERT_EQ(m.params.size(), kGinTensorCount);
  EXPECT_EQ(m.params[0].name, "gin0.mlp1.weight");
  EXPECT_EQ(m.params[0].shape, (std::vector<std::uint32_t> { 64, 7 }));
  EXPECT_EQ(m.params[6].shape, (std::vector<std::uint32_t> { 64, 64 }));
  EXPECT_EQ(m.params[kGinPost2Weight].shape, (std::vector<std::uint32_t> { 128, 128 }));
  EXPECT_EQ(m.params[kGinHeadWeight].shape, (std::vector<std::uint32_t> { 2, 128 }));
  EXPECT_EQ(parameter_count(m.params),
            64 * 8 + 64 * 65 + 2 * (64 * 65 * 2) + 128 * 65 + 128 * 129 + 2 * 129);
  const double bound = 1.0 / std::sqrt(7.0);
  for (double v: m.params[0].values) {
    EXPECT_LE(std::abs(v), bound);
  }
}

TEST(GinTest, SingleNodeIdentityPassesFeaturesThrough) {
  const auto g = parse_smiles("C");
  const auto out = gin_forward(g, identity_model());
  ASSERT_EQ(out.embedding.size(), kGinEmbedding);
  for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
    EXPECT_DOUBLE_EQ(out.embedding[c], g.node_features(0, c));
  }
  for (std::size_t c = kNodeFeatureCount; c < kGinEmbedding; ++c) {
    EXPECT_EQ(out.embedding[c], 0.0);
  }
}

TEST(GinTest, K2UpdateIsTwoPlusEpsTimesX) {
  const auto g = parse_smiles("CC");
  GinModel m = identity_model();
  m.eps = { 0.5, 0.25, 0.0 };
  const auto out = gin_forward(g, m);
  // Each layer maps x to (1 + eps) x + x on both nodes; sum pooling doubles.
  const double factor = 2.0 * 2.5 * 2.25 * 2.0;
  for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
    EXPECT_NEAR(out.embedding[c], factor * g.node_features(0, c), 1e-12);
  }
  m.readout = Readout::kMean;
  EXPECT_NEAR(gin_forward(g, m).embedding[0], 0.5 * factor * g.node_features(0, 0), 1e-12);
}

TEST(GinTest, PermutationInvariantEmbedding) {
  const GinModel m = gin_init(4);
  Rng rng(5);
  const auto mols = testing::corpus_molecules();
  for (std::size_t i = 0; i < mols.size(); i += 8) {
    const auto base = gin_forward(mols[i], m);
    for (int t = 0; t < 5; ++t) {
      const auto perm = testing::random_permutation(mols[i].atom_count(), rng);
      const auto out = gin_forward(permute_atoms(mols[i], perm), m);
      for (std::size_t c = 0; c < kGinEmbedding; ++c) {
        EXPECT_NEAR(out.embedding[c], base.embedding[c], 1e-9);
      }
    }
  }
}

TEST(GinTest, SoftmaxAndLoss) {
  const GinModel m = gin_init(2);
  for (const char *s: { "c1ccccc1", "CCO", "O=[N+]([O-])c1ccccc1" }) {
    const auto g = parse_smiles(s);
    const auto out = gin_forward(g, m);
    const auto p = softmax2(out.logits.data());
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    for (int y: { 0, 1 }) {
      const double loss = gin_loss(g, y, m);
      EXPECT_GE(loss, 0.0);
      EXPECT_NEAR(loss, -std::log(p[y]), 1e-12);
    }
  }
  EXPECT_THROW(gin_loss(parse_smiles("C"), 2, m), Error);
}

TEST(GinTest, ShapeMismatch) {
  GinModel m = gin_init(1);
  m.params[3] = Tensor("gin0.mlp2.bias", { 63 });
  try {
    gin_forward(parse_smiles("CC"), m);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(GinGradTest, BenzeneRandomInit) {
  GradCheckOptions opt;
  opt.h = 1e-3;
  opt.richardson = true;
  const auto r = gin_grad_check(gin_init(11), parse_smiles("c1ccccc1"), 1, opt);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
  EXPECT_EQ(r.checked + r.excluded, 46402U);
  EXPECT_GT(r.checked, r.excluded * 10);
}

TEST(GinGradTest, IncrementalMatchesFullForward) {
  const auto g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  const GinModel m = gin_init(3);
  GradCheckOptions opt;
  opt.h = 1e-3;
  const auto fast = gin_grad_check(m, g, 0, opt);
  opt.full_forward = true;
  const auto full = gin_grad_check(m, g, 0, opt);
  ASSERT_EQ(fast.excluded, full.excluded);
  for (std::size_t t = 0; t < fast.numeric.size(); ++t) {
    for (std::size_t i = 0; i < fast.numeric[t].values.size(); ++i) {
      const double a = fast.numeric[t].values[i], b = full.numeric[t].values[i];
      ASSERT_EQ(std::isnan(a), std::isnan(b));
      if (!std::isnan(a)) {
        ASSERT_NEAR(a, b, 1e-10) << fast.numeric[t].name << "[" << i << "]";
      }
    }
  }
}

TEST(GinGradTest, CentralDifferenceErrorIsSecondOrder) {
  const auto g = parse_smiles("CCO");
  const GinModel m = gin_init(7);
  // The same parameters must be compared at both steps, so exclude with
  // the larger step's pattern check.
  GradCheckOptions coarse;
  coarse.h = 1e-3;
  const auto a = gin_grad_check(m, g, 1, coarse);
  GradCheckOptions fine = coarse;
  fine.h = 1e-4;
  const auto b = gin_grad_check(m, g, 1, fine);
  TensorList grad = zeros_like(m.params);
  gin_loss(g, 1, m, &grad);
  double ea = 0.0, eb = 0.0;
  for (std::size_t t = 0; t < grad.size(); ++t) {
    for (std::size_t i = 0; i < grad[t].values.size(); ++i) {
      if (!std::isnan(a.numeric[t].values[i])) {
        ea = std::max(ea, std::abs(a.numeric[t].values[i] - grad[t].values[i]));
        eb = std::max(eb, std::abs(b.numeric[t].values[i] - grad[t].values[i]));
      }
    }
  }
  EXPECT_GT(ea / eb, 50.0);
  EXPECT_LT(ea / eb, 200.0);
}

TEST(GinGradTest, ZeroParametersStayFinite) {
  GradCheckOptions opt;
  opt.h = 1e-3;
  opt.richardson = true;
  const auto r = gin_grad_check(gin_zeros(), parse_smiles("c1ccncc1"), 0, opt);
  EXPECT_TRUE(std::isfinite(r.max_rel_error));
  EXPECT_LT(r.max_rel_error, 1e-6);
  TensorList grad = zeros_like(gin_zeros().params);
  EXPECT_NEAR(gin_loss(parse_smiles("CCN"), 0, gin_zeros(), &grad), std::log(2.0), 1e-15);
  for (const auto &t: grad) {
    for (double v: t.values) {
      EXPECT_TRUE(std::isfinite(v));
    }
  }
}

TEST(AdamTest, DecayShrinksNormWithZeroGradient) {
  TensorList p = gin_init(9).params;
  const TensorList zero = zeros_like(p);
  AdamConfig cfg;
  cfg.lr = 1e-2;
  cfg.weight_decay = 0.1;
  Adam adam(p, cfg);
  double prev = squared_norm(p);
  for (int s = 0; s < 20; ++s) {
    adam.step(p, zero);
    const double now = squared_norm(p);
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(AdamTest, FirstStepMovesByLr) {
  Tensor t("x", { 3 });
  t.values = { 1.0, -2.0, 0.5 };
  TensorList p { t };
  Tensor g("x", { 3 });
  g.values = { 0.3, -4.0, 0.0 };
  AdamConfig cfg;
  cfg.lr = 0.1;
  Adam adam(p, cfg);
  adam.step(p, TensorList { g });
  // m_hat = g and v_hat = g^2 after bias correction.
  EXPECT_NEAR(p[0].values[0], 1.0 - 0.1 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(p[0].values[1], -2.0 + 0.1 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(p[0].values[2], 0.5);
}

LabeledGraphs toy_set(int count, int offset) {
  // Alkanes are class 0, the same chains ending in an amine are class 1.
  LabeledGraphs d;
  for (int i = 0; i < count; ++i) {
    const std::string chain(static_cast<std::size_t>(2 + (i + offset) % 8), 'C');
    const bool pos = i % 2 == 1;
    d.graphs.push_back(parse_smiles(pos ? chain + "N" : chain));
    d.labels.push_back(pos ? 1 : 0);
  }
  return d;
}

TEST(TrainGinTest, SeparableToyReachesLowLoss) {
  const auto train = toy_set(20, 0);
  const auto val = toy_set(6, 3);
  TrainConfig cfg;
  cfg.adam.lr = 1e-2;
  cfg.epochs = 200;
  cfg.patience = -1;
  cfg.seed = 3;
  TrainLog log;
  const GinModel m = train_gin(train, val, cfg, &log);
  ASSERT_EQ(log.epochs.size(), 200U);
  double loss = 0.0;
  for (std::size_t i = 0; i < train.graphs.size(); ++i) {
    loss += gin_loss(train.graphs[i], train.labels[i], m);
  }
  EXPECT_LT(loss / static_cast<double>(train.graphs.size()), 0.1);
  EXPECT_LT(log.epochs.back().train_loss, 0.1);
}

TEST(TrainGinTest, DeterministicAcrossRunsAndThreads) {
  const auto train = toy_set(20, 0);
  const auto val = toy_set(6, 3);
  TrainConfig cfg;
  cfg.adam.lr = 1e-2;
  cfg.epochs = 5;
  cfg.batch_size = 7;
  cfg.seed = 42;
  const auto dir = std::filesystem::temp_directory_path();
  save_gin(dir / "gin_a.gprm", train_gin(train, val, cfg));
  save_gin(dir / "gin_b.gprm", train_gin(train, val, cfg));
  cfg.threads = 3;
  save_gin(dir / "gin_c.gprm", train_gin(train, val, cfg));
  const auto a = slurp(dir / "gin_a.gprm");
  EXPECT_EQ(a, slurp(dir / "gin_b.gprm"));
  EXPECT_EQ(a, slurp(dir / "gin_c.gprm"));
  for (const char *f: { "gin_a.gprm", "gin_b.gprm", "gin_c.gprm" }) {
    std::filesystem::remove(dir / f);
  }
}

TEST(TrainGinTest, ZeroLearningRateKeepsInit) {
  TrainConfig cfg;
  cfg.adam.lr = 0.0;
  cfg.adam.weight_decay = 0.5;
  cfg.epochs = 10;
  cfg.seed = 8;
  const GinModel m = train_gin(toy_set(10, 0), toy_set(4, 1), cfg);
  EXPECT_EQ(m.params, gin_init(8).params);
}

TEST(TrainGinTest, EarlyStoppingReturnsBestEpoch) {
  TrainConfig cfg;
  cfg.adam.lr = 5e-2;
  cfg.epochs = 300;
  cfg.patience = 3;
  cfg.seed = 1;
  TrainLog log;
  const auto val = toy_set(6, 3);
  const GinModel m = train_gin(toy_set(12, 0), val, cfg, &log);
  ASSERT_FALSE(log.epochs.empty());
  double best = 1e300;
  int best_epoch = 0;
  for (const auto &e: log.epochs) {
    if (e.val_loss < best) {
      best = e.val_loss;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(log.best_epoch, best_epoch);
  if (static_cast<int>(log.epochs.size()) < cfg.epochs) {
    EXPECT_EQ(static_cast<int>(log.epochs.size()), best_epoch + cfg.patience + 1);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < val.graphs.size(); ++i) {
    loss += gin_loss(val.graphs[i], val.labels[i], m);
  }
  EXPECT_NEAR(loss / static_cast<double>(val.graphs.size()), best, 1e-12);
}

TEST(TrainGinTest, Errors) {
  TrainConfig cfg;
  LabeledGraphs one_class;
  one_class.graphs = { parse_smiles("CC"), parse_smiles("CCC") };
  one_class.labels = { 0, 0 };
  try {
    train_gin(one_class, toy_set(2, 0), cfg);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
  EXPECT_THROW(train_gin(toy_set(4, 0), LabeledGraphs {}, cfg), Error);
}

TEST(GinIoTest, RoundTripAndEmbeddings) {
  GinModel m = gin_init(21);
  m.input_mean[2] = 1.5;
  m.input_scale[5] = 12.0;
  m.eps = { 0.0, 0.1, 0.2 };
  m.readout = Readout::kMean;
  const auto path = std::filesystem::temp_directory_path() / "gin_io.gprm";
  save_gin(path, m);
  const GinModel back = load_gin(path);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.input_mean, m.input_mean);
  EXPECT_EQ(back.input_scale, m.input_scale);
  EXPECT_EQ(back.eps, m.eps);
  EXPECT_EQ(back.readout, Readout::kMean);
  std::filesystem::remove(path);

  const std::vector<MolecularGraph> gs { parse_smiles("CCO"), parse_smiles("c1ccccc1") };
  const Matrix e1 = gin_embeddings(gs, m, 1);
  const Matrix e2 = gin_embeddings(gs, m, 2);
  EXPECT_EQ(e1, e2);
  ASSERT_EQ(e1.cols(), kGinEmbedding);
  EXPECT_EQ(e1(1, 5), gin_forward(gs[1], m).embedding[5]);
}

}  // namespace
}  // namespace geoscatt
