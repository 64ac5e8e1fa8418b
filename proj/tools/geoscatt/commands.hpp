// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geoscatt/evalhead/cv.hpp"
#include "geoscatt/gnn/gin.hpp"
#include "geoscatt/gst/scatter.hpp"
#include "geoscatt/metagraph/sage.hpp"
#include "runlog.hpp"

namespace geoscatt::cli {

namespace fs = std::filesystem;

/// Options every subcommand shares. Paths left empty fall back to fixed
/// names inside workdir.
struct Common {
  fs::path workdir = ".";
  int threads = 0;
  std::uint64_t seed = 0;
  /// Effective configuration as CLI11 renders it; hashed into the run-log.
  std::string config_text;

  fs::path in_workdir(const fs::path &given, const char *fallback) const {
    return given.empty() ? workdir / fallback : given;
  }
};

struct IngestOptions {
  fs::path input;
  fs::path manifest;
  fs::path report;
  double test_fraction = 0.2;
};
void run_ingest(const Common &c, const IngestOptions &o);

struct GstOptions {
  fs::path manifest;
  fs::path out;
  GgsConfig ggs;
  std::string hann_variant = "paper-exact";
  std::string hann_block = "zeroth";
};
void run_featurize_gst(const Common &c, const GstOptions &o);

struct Scatter2dOptions {
  fs::path manifest;
  fs::path out;
  fs::path selection;
  fs::path images;
  int J = 9;
  int L = 8;
  std::size_t size = 512;
  int order = 2;
  std::size_t k_select = 4000;
};
void run_featurize_2d(const Common &c, const Scatter2dOptions &o);

struct GinOptions {
  fs::path manifest;
  fs::path out;
  fs::path log;
  double val_fraction = 0.1;
  TrainConfig train;
  std::string readout = "sum";
};
void run_train_gin(const Common &c, const GinOptions &o);

struct EmbedOptions {
  fs::path manifest;
  fs::path model;
  fs::path out;
};
void run_export_embeddings(const Common &c, const EmbedOptions &o);

struct MetaGraphOptions {
  fs::path manifest;
  std::vector<fs::path> features;
  fs::path out_dir;
  double val_fraction = 0.1;
  std::size_t top_k = 0;
};
void run_build_metagraph(const Common &c, const MetaGraphOptions &o);

struct SageOptions {
  fs::path metagraph;
  fs::path out;
  fs::path log;
  SageConfig train;
};
void run_train_sage(const Common &c, const SageOptions &o);

struct HeadOptions {
  fs::path manifest;
  std::vector<fs::path> features;
  fs::path out;
  double l2 = 1e-2;
  LogRegConfig solver;
};
void run_fit_head(const Common &c, const HeadOptions &o);

struct EvaluateOptions {
  fs::path manifest;
  std::vector<fs::path> features;
  fs::path model;
  fs::path sage;
  fs::path metagraph;
  fs::path out;
  std::string split = "test";
  double threshold = 0.5;
};
void run_evaluate(const Common &c, const EvaluateOptions &o);

struct CvOptions {
  fs::path manifest;
  std::vector<fs::path> features;
  fs::path out;
  std::size_t k = 10;
  std::string split = "train";
  HeadConfig head;
};
void run_cv(const Common &c, const CvOptions &o);

}  // namespace geoscatt::cli
