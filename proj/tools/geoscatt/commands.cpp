// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/ingest/dataset.hpp"
#include "geoscatt/io/csv.hpp"
#include "geoscatt/io/formats.hpp"
#include "geoscatt/metagraph/metagraph.hpp"
#include "geoscatt/scatter2d/chi2.hpp"
#include "geoscatt/scatter2d/image.hpp"
#include "geoscatt/scatter2d/morlet.hpp"

namespace geoscatt::cli {

namespace {

struct Dataset {
  std::vector<ManifestRow> rows;
  std::vector<MolecularGraph> graphs;
  std::vector<int> labels;

  std::vector<std::size_t> rows_in(const std::string &split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (split == "all" || rows[i].split == split) {
        out.push_back(i);
      }
    }
    return out;
  }
};

Dataset load_dataset(const fs::path &manifest, unsigned threads, bool graphs) {
  Dataset d;
  d.rows = read_manifest(manifest);
  for (const auto &r: d.rows) {
    d.labels.push_back(r.label);
  }
  if (graphs) {
    d.graphs.resize(d.rows.size());
    parallel_for(d.rows.size(), threads,
                 [&](std::size_t i) { d.graphs[i] = parse_smiles(d.rows[i].canonical_key); });
  }
  return d;
}

template <class T>
std::vector<T> pick(const std::vector<T> &v, const std::vector<std::size_t> &idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i: idx) {
    out.push_back(v[i]);
  }
  return out;
}

Matrix load_feature_blocks(const std::vector<fs::path> &paths, std::size_t rows,
                           RunLog &log) {
  std::vector<Matrix> blocks;
  for (const auto &p: paths) {
    blocks.push_back(read_features(p));
    log.input("features", p);
    if (blocks.back().rows() != rows) {
      throw Error(ErrorCode::kDimensionMismatch,
                  p.string() + " has " + std::to_string(blocks.back().rows()) +
                      " rows, manifest has " + std::to_string(rows));
    }
  }
  return hconcat(blocks);
}

std::vector<fs::path> features_or_default(const Common &c, const std::vector<fs::path> &given) {
  return given.empty() ? std::vector<fs::path> { c.workdir / "ggs.fmat" } : given;
}

void ensure_parent(const fs::path &p) {
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
}

std::vector<std::string> numbered(const std::string &prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(prefix + std::to_string(i));
  }
  return out;
}

// Stratified carve-out of validation rows from the training rows.
std::vector<bool> validation_mask(const Dataset &d, const std::vector<std::size_t> &train,
                                  double fraction, std::uint64_t seed) {
  std::vector<bool> val(d.rows.size(), false);
  if (fraction <= 0.0) {
    return val;
  }
  const Split s = split_dataset(pick(d.labels, train), fraction, seed);
  for (auto i: s.test) {
    val[train[i]] = true;
  }
  return val;
}

}  // namespace

void run_ingest(const Common &c, const IngestOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("ingest", c.config_text);
  log.seed(c.seed);
  log.threads(threads);
  log.input("dataset", o.input);

  const auto rows = read_labeled_smiles(o.input);
  IngestReport report;
  auto records = dedup_clear_evidence(build_records(rows, threads, &report));
  report.after_dedup = records.size();
  report.positives = 0;
  std::vector<int> labels;
  for (const auto &r: records) {
    labels.push_back(r.label);
    report.positives += static_cast<std::size_t>(r.label);
  }
  const Split split = split_dataset(labels, o.test_fraction, c.seed);
  std::vector<ManifestRow> manifest(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    manifest[i] = { records[i].canonical_key, records[i].label, "train" };
  }
  for (auto i: split.test) {
    manifest[i].split = "test";
  }

  const fs::path out = c.in_workdir(o.manifest, "manifest.csv");
  const fs::path report_path = c.in_workdir(o.report, "ingest_report.json");
  ensure_parent(out);
  ensure_parent(report_path);
  write_manifest(out, manifest);

  nlohmann::ordered_json j;
  j["input_rows"] = report.input_rows;
  j["parsed"] = report.parsed;
  j["after_dedup"] = report.after_dedup;
  j["positives"] = report.positives;
  j["negatives"] = report.after_dedup - report.positives;
  j["train"] = split.train.size();
  j["test"] = split.test.size();
  j["dropped"] = report.dropped;
  std::ofstream(report_path) << j.dump(2) << '\n';

  log.output("manifest", out);
  log.output("report", report_path);
  log.write(c.workdir);
  std::cout << "ingest: " << report.input_rows << " rows, " << report.parsed << " parsed, "
            << report.after_dedup << " after dedup (" << report.positives
            << " positive), " << split.train.size() << " train / " << split.test.size()
            << " test\n";
}

void run_featurize_gst(const Common &c, const GstOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("featurize-gst", c.config_text);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, threads, true);

  GgsConfig cfg = o.ggs;
  cfg.hann_variant = parse_hann_variant(o.hann_variant);
  cfg.hann_block = o.hann_block == "full" ? HannBlock::kFull : HannBlock::kZeroth;
  const std::size_t width = ggs_length(cfg);
  Matrix X(d.rows.size(), width);
  parallel_for(d.rows.size(), threads, [&](std::size_t i) {
    const auto v = ggs_features(d.graphs[i], cfg).values;
    std::copy(v.begin(), v.end(), X.row(i).begin());
  });

  const fs::path out = c.in_workdir(o.out, "ggs.fmat");
  ensure_parent(out);
  write_features(out, X, ggs_labels(cfg));
  log.output("features", out);
  log.write(c.workdir);
  std::cout << "featurize-gst: " << X.rows() << " x " << X.cols() << " -> " << out.string()
            << '\n';
}

void run_featurize_2d(const Common &c, const Scatter2dOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("featurize-2d", c.config_text);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, threads, true);

  const MorletBank bank = morlet_bank(o.J, o.L, o.size);
  const std::size_t width = scatter2d_length(o.J, o.L, o.size, o.order);
  Matrix X(d.rows.size(), width);
  if (!o.images.empty()) {
    fs::create_directories(o.images);
  }
  parallel_for(d.rows.size(), threads, [&](std::size_t i) {
    const Image img = rasterize(d.graphs[i], o.size);
    if (!o.images.empty()) {
      write_pgm(o.images / (std::to_string(i) + ".pgm"), img);
    }
    const auto v = scatter_image(img, bank, o.order).values;
    std::copy(v.begin(), v.end(), X.row(i).begin());
  });

  std::vector<std::string> names;
  for (const auto &l: scatter2d_labels(o.J, o.L, o.size, o.order)) {
    names.push_back(label_text(l));
  }
  const fs::path out = c.in_workdir(o.out, "scatter2d.fmat");
  ensure_parent(out);
  if (o.k_select == 0) {
    write_features(out, X, names);
  } else {
    // Statistics come from the training rows only.
    const auto train = d.rows_in("train");
    const Matrix Xt = select_rows(X, train);
    const auto yt = pick(d.labels, train);
    std::size_t k = o.k_select;
    if (k > width) {
      std::cerr << "featurize-2d: --k-select " << k << " exceeds the " << width
                << " coefficients; keeping all of them\n";
      k = width;
    }
    const auto stats = chi2_statistics(Xt, yt);
    const auto cols = chi2_select(Xt, yt, k);
    std::vector<std::string> kept;
    for (auto col: cols) {
      kept.push_back(names[col]);
    }
    write_features(out, select_columns(X, cols), kept);

    const fs::path sel = c.in_workdir(o.selection, "scatter2d_columns.csv");
    ensure_parent(sel);
    std::ofstream s(sel);
    s << "rank,column,label,chi2\n";
    for (std::size_t r = 0; r < cols.size(); ++r) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", stats[cols[r]]);
      s << r << ',' << cols[r] << ',' << csv_escape(names[cols[r]]) << ',' << buf << '\n';
    }
    log.output("selection", sel);
  }
  log.output("features", out);
  log.note("coefficients", std::to_string(width));
  log.write(c.workdir);
  std::cout << "featurize-2d: " << X.rows() << " images, " << width << " coefficients -> "
            << out.string() << '\n';
}

void run_train_gin(const Common &c, const GinOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("train-gin", c.config_text);
  log.seed(c.seed);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, threads, true);

  const auto train_rows = d.rows_in("train");
  const auto val = validation_mask(d, train_rows, o.val_fraction, c.seed);
  LabeledGraphs train, valid;
  for (auto i: train_rows) {
    auto &dst = val[i] ? valid : train;
    dst.graphs.push_back(d.graphs[i]);
    dst.labels.push_back(d.labels[i]);
  }
  TrainConfig cfg = o.train;
  cfg.seed = c.seed;
  cfg.threads = threads;
  cfg.readout = o.readout == "mean" ? Readout::kMean : Readout::kSum;
  TrainLog curve;
  const GinModel model = train_gin(train, valid, cfg, &curve);

  const fs::path out = c.in_workdir(o.out, "gin.gprm");
  const fs::path log_path = c.in_workdir(o.log, "gin_train_log.csv");
  ensure_parent(out);
  ensure_parent(log_path);
  save_gin(out, model);
  write_train_log(log_path, curve);
  log.output("model", out);
  log.output("training_log", log_path);
  log.note("best_epoch", std::to_string(curve.best_epoch));
  log.write(c.workdir);
  std::cout << "train-gin: " << train.graphs.size() << " train / " << valid.graphs.size()
            << " val molecules, " << curve.epochs.size() << " epochs, best epoch "
            << curve.best_epoch << '\n';
}

void run_export_embeddings(const Common &c, const EmbedOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("export-embeddings", c.config_text);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  const fs::path model_path = c.in_workdir(o.model, "gin.gprm");
  log.input("manifest", manifest);
  log.input("model", model_path);
  const Dataset d = load_dataset(manifest, threads, true);
  const Matrix E = gin_embeddings(d.graphs, load_gin(model_path), threads);

  const fs::path out = c.in_workdir(o.out, "gin_embeddings.fmat");
  ensure_parent(out);
  write_features(out, E, numbered("gin", E.cols()));
  log.output("embeddings", out);
  log.write(c.workdir);
  std::cout << "export-embeddings: " << E.rows() << " x " << E.cols() << " -> "
            << out.string() << '\n';
}

void run_build_metagraph(const Common &c, const MetaGraphOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("build-metagraph", c.config_text);
  log.seed(c.seed);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, threads, false);
  const Matrix S = load_feature_blocks(features_or_default(c, o.features), d.rows.size(), log);

  MetaGraph mg = build_metagraph(S, threads);
  if (o.top_k > 0) {
    sparsify_top_k(mg, o.top_k);
  }
  const auto val = validation_mask(d, d.rows_in("train"), o.val_fraction, c.seed);
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    mg.labels[i] = d.labels[i];
    mg.split[i] = d.rows[i].split == "test" ? NodeSplit::kTest
                                           : (val[i] ? NodeSplit::kVal : NodeSplit::kTrain);
  }
  const fs::path out = c.in_workdir(o.out_dir, "metagraph");
  fs::create_directories(out);
  save_metagraph(out, mg);
  log.output("metagraph", out);
  log.output("nodes", out / "nodes.csv");
  log.output("weights", out / "weights.fmat");
  log.output("features", out / "features.fmat");
  char sigma[32];
  std::snprintf(sigma, sizeof(sigma), "%.17g", mg.sigma);
  log.note("sigma", sigma);
  log.write(c.workdir);
  std::cout << "build-metagraph: " << mg.size() << " nodes, sigma " << sigma << " -> "
            << out.string() << '\n';
}

void run_train_sage(const Common &c, const SageOptions &o) {
  RunLog log("train-sage", c.config_text);
  log.seed(c.seed);
  const fs::path dir = c.in_workdir(o.metagraph, "metagraph");
  log.input("nodes", dir / "nodes.csv");
  log.input("weights", dir / "weights.fmat");
  log.input("features", dir / "features.fmat");
  const MetaGraph mg = load_metagraph(dir);
  SageConfig cfg = o.train;
  cfg.seed = c.seed;
  TrainLog curve;
  const SageModel model = train_sage(mg, cfg, &curve);

  const fs::path out = c.in_workdir(o.out, "sage.gprm");
  const fs::path log_path = c.in_workdir(o.log, "sage_train_log.csv");
  ensure_parent(out);
  ensure_parent(log_path);
  save_sage(out, model);
  write_train_log(log_path, curve);
  log.output("model", out);
  log.output("training_log", log_path);
  log.note("best_epoch", std::to_string(curve.best_epoch));
  log.write(c.workdir);
  std::cout << "train-sage: " << curve.epochs.size() << " epochs, best epoch "
            << curve.best_epoch << '\n';
}

void run_fit_head(const Common &c, const HeadOptions &o) {
  RunLog log("fit-head", c.config_text);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, 1, false);
  const Matrix X = load_feature_blocks(features_or_default(c, o.features), d.rows.size(), log);
  const auto train = d.rows_in("train");
  LogRegFit fit;
  const LogRegModel model =
      fit_logreg(select_rows(X, train), pick(d.labels, train), o.l2, o.solver, &fit);

  const fs::path out = c.in_workdir(o.out, "head.gprm");
  ensure_parent(out);
  save_logreg(out, model);
  log.output("model", out);
  log.note("iterations", std::to_string(fit.iterations));
  log.note("converged", fit.converged ? "true" : "false");
  log.write(c.workdir);
  std::cout << "fit-head: " << train.size() << " rows x " << X.cols() << " features, "
            << fit.iterations << " iterations, gradient norm " << fit.grad_norm
            << (fit.converged ? "" : " (iteration cap reached)") << '\n';
}

void run_evaluate(const Common &c, const EvaluateOptions &o) {
  RunLog log("evaluate", c.config_text);
  std::vector<int> y;
  std::vector<double> scores;
  std::string name;
  if (!o.sage.empty()) {
    const fs::path dir = c.in_workdir(o.metagraph, "metagraph");
    log.input("model", o.sage);
    log.input("nodes", dir / "nodes.csv");
    const MetaGraph mg = load_metagraph(dir);
    const auto p = sage_predict(mg, load_sage(o.sage));
    const NodeSplit want = parse_node_split(o.split == "all" ? "test" : o.split);
    for (std::size_t i = 0; i < mg.size(); ++i) {
      if (o.split == "all" || mg.split[i] == want) {
        y.push_back(mg.labels[i]);
        scores.push_back(p[i]);
      }
    }
    name = "sage";
  } else {
    const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
    const fs::path model_path = c.in_workdir(o.model, "head.gprm");
    log.input("manifest", manifest);
    log.input("model", model_path);
    const Dataset d = load_dataset(manifest, 1, false);
    const Matrix X =
        load_feature_blocks(features_or_default(c, o.features), d.rows.size(), log);
    const auto rows = d.rows_in(o.split);
    scores = predict_proba(load_logreg(model_path), select_rows(X, rows));
    y = pick(d.labels, rows);
    name = "head";
  }
  const MetricsReport r = metrics(y, scores, o.threshold);
  const fs::path out = c.in_workdir(o.out, "metrics.csv");
  ensure_parent(out);
  write_metrics_csv(out, name + ":" + o.split, r);
  log.output("metrics", out);
  log.write(c.workdir);
  print_metrics_table(std::cout, r);
}

void run_cv(const Common &c, const CvOptions &o) {
  const unsigned threads = resolve_threads(c.threads);
  RunLog log("cv", c.config_text);
  log.seed(c.seed);
  log.threads(threads);
  const fs::path manifest = c.in_workdir(o.manifest, "manifest.csv");
  log.input("manifest", manifest);
  const Dataset d = load_dataset(manifest, 1, false);
  const Matrix X = load_feature_blocks(features_or_default(c, o.features), d.rows.size(), log);
  const auto rows = d.rows_in(o.split);
  const CvReport report =
      kfold_cv(select_rows(X, rows), pick(d.labels, rows), o.k, c.seed, o.head, threads);

  const fs::path out = c.in_workdir(o.out, "cv.csv");
  ensure_parent(out);
  write_cv_csv(out, report);
  log.output("report", out);
  log.write(c.workdir);
  print_cv_table(std::cout, report);
}

}  // namespace geoscatt::cli
