// SPDX-License-Identifier: Apache-2.0
// geoscatt: molecule featurization, GNN training and evaluation pipeline.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "geoscatt/common/error.hpp"

namespace {

using namespace geoscatt;
using namespace geoscatt::cli;

void report_error(const std::string &category, const std::string &message) {
  nlohmann::ordered_json j { { "error", category }, { "message", message } };
  std::cerr << j.dump() << '\n';
}

// --workdir and --threads on every subcommand, --seed where randomness is
// involved (required there).
void add_common(CLI::App *sub, Common &c, bool seeded) {
  sub->fallthrough();
  sub->add_option("--workdir", c.workdir, "Directory for default inputs, outputs and logs")
      ->capture_default_str();
  sub->add_option("--threads", c.threads,
                  "Worker threads (0: GEOSCATT_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  if (seeded) {
    sub->add_option("--seed", c.seed, "Random seed")->required();
  }
}

CLI::Option *path_opt(CLI::App *sub, const std::string &name, std::filesystem::path &p,
                      const std::string &help) {
  return sub->add_option(name, p, help);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "Geometric scattering features and graph networks for molecular property "
                 "prediction" };
  app.set_version_flag("--version", GEOSCATT_VERSION);
  app.set_config("--config", "", "key=value file with one [section] per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Common common;
  // ingest
  IngestOptions ingest;
  auto *c_ingest = app.add_subcommand("ingest", "SMILES CSV -> deduplicated, split manifest");
  add_common(c_ingest, common, true);
  path_opt(c_ingest, "--input", ingest.input, "CSV with smiles,label columns")
      ->required()
      ->check(CLI::ExistingFile);
  path_opt(c_ingest, "--out", ingest.manifest, "Manifest (default <workdir>/manifest.csv)");
  path_opt(c_ingest, "--report", ingest.report,
           "Counts JSON (default <workdir>/ingest_report.json)");
  c_ingest->add_option("--test-fraction", ingest.test_fraction, "Held-out fraction per class")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  // featurize-gst
  GstOptions gst;
  auto *c_gst = app.add_subcommand("featurize-gst", "Geometric graph scattering features");
  add_common(c_gst, common, false);
  path_opt(c_gst, "--manifest", gst.manifest, "Manifest (default <workdir>/manifest.csv)");
  path_opt(c_gst, "--out", gst.out, "Output .fmat or .csv (default <workdir>/ggs.fmat)");
  c_gst->add_option("--diffusion-J", gst.ggs.diffusion_J, "Diffusion wavelet scales")
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  c_gst->add_option("--depth", gst.ggs.diffusion_depth, "Diffusion scattering order")
      ->check(CLI::Range(0, 4))
      ->capture_default_str();
  c_gst->add_option("--hann-J", gst.ggs.hann_J, "Hann wavelet count")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  c_gst->add_option("--hann-R", gst.ggs.hann_R, "Hann overlap parameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_gst->add_option("--hann-variant", gst.hann_variant, "Hann kernel form")
      ->check(CLI::IsMember({ "paper-exact", "standard-hann" }))
      ->capture_default_str();
  c_gst->add_option("--hann-block", gst.hann_block, "Hann orders kept")
      ->check(CLI::IsMember({ "zeroth", "full" }))
      ->capture_default_str();

  // featurize-2d
  Scatter2dOptions s2d;
  auto *c_2d = app.add_subcommand("featurize-2d", "2D Morlet scattering of rasterized molecules");
  add_common(c_2d, common, false);
  path_opt(c_2d, "--manifest", s2d.manifest, "Manifest (default <workdir>/manifest.csv)");
  path_opt(c_2d, "--out", s2d.out, "Output .fmat or .csv (default <workdir>/scatter2d.fmat)");
  path_opt(c_2d, "--selection", s2d.selection,
           "Selected-column list (default <workdir>/scatter2d_columns.csv)");
  path_opt(c_2d, "--images", s2d.images, "Also write every image as PGM into this directory");
  c_2d->add_option("--J", s2d.J, "Scales")->check(CLI::Range(1, 12))->capture_default_str();
  c_2d->add_option("--L", s2d.L, "Orientations")->check(CLI::Range(1, 32))->capture_default_str();
  c_2d->add_option("--size", s2d.size, "Image side in pixels (power of two)")
      ->check(CLI::Range(16, 4096))
      ->capture_default_str();
  c_2d->add_option("--order", s2d.order, "Scattering order")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  c_2d->add_option("--k-select", s2d.k_select, "Chi-squared top-k columns (0 keeps all)")
      ->capture_default_str();

  // train-gin
  GinOptions gin;
  auto *c_gin = app.add_subcommand("train-gin", "Train the GIN on the manifest's train rows");
  add_common(c_gin, common, true);
  path_opt(c_gin, "--manifest", gin.manifest, "Manifest (default <workdir>/manifest.csv)");
  path_opt(c_gin, "--out", gin.out, "Parameters (default <workdir>/gin.gprm)");
  path_opt(c_gin, "--log", gin.log, "Training curve (default <workdir>/gin_train_log.csv)");
  c_gin->add_option("--val-fraction", gin.val_fraction, "Validation share of the train rows")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c_gin->add_option("--epochs", gin.train.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  c_gin->add_option("--lr", gin.train.adam.lr)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_gin->add_option("--weight-decay", gin.train.adam.weight_decay)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_gin->add_option("--batch-size", gin.train.batch_size, "0 for full batch")
      ->capture_default_str();
  c_gin->add_option("--patience", gin.train.patience, "Early stopping; negative disables")
      ->capture_default_str();
  c_gin->add_option("--readout", gin.readout)
      ->check(CLI::IsMember({ "sum", "mean" }))
      ->capture_default_str();

  // export-embeddings
  EmbedOptions embed;
  auto *c_embed = app.add_subcommand("export-embeddings", "128-d GIN embeddings per molecule");
  add_common(c_embed, common, false);
  path_opt(c_embed, "--manifest", embed.manifest, "Manifest (default <workdir>/manifest.csv)");
  path_opt(c_embed, "--model", embed.model, "GIN parameters (default <workdir>/gin.gprm)");
  path_opt(c_embed, "--out", embed.out, "Output (default <workdir>/gin_embeddings.fmat)");

  // build-metagraph
  MetaGraphOptions mg;
  auto *c_mg = app.add_subcommand("build-metagraph", "Gaussian-kernel molecule graph");
  add_common(c_mg, common, true);
  path_opt(c_mg, "--manifest", mg.manifest, "Manifest (default <workdir>/manifest.csv)");
  c_mg->add_option("--features", mg.features,
                   "Node feature files, concatenated (default <workdir>/ggs.fmat)");
  path_opt(c_mg, "--out-dir", mg.out_dir, "Output directory (default <workdir>/metagraph)");
  c_mg->add_option("--val-fraction", mg.val_fraction, "Validation share of the train rows")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c_mg->add_option("--top-k", mg.top_k, "Keep only the k heaviest neighbours (0: dense)")
      ->capture_default_str();

  // train-sage
  SageOptions sage;
  auto *c_sage = app.add_subcommand("train-sage", "Train the weighted GraphSAGE on a meta-graph");
  add_common(c_sage, common, true);
  path_opt(c_sage, "--metagraph", sage.metagraph, "Meta-graph directory (default <workdir>/metagraph)");
  path_opt(c_sage, "--out", sage.out, "Parameters (default <workdir>/sage.gprm)");
  path_opt(c_sage, "--log", sage.log, "Training curve (default <workdir>/sage_train_log.csv)");
  c_sage->add_option("--epochs", sage.train.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  c_sage->add_option("--lr", sage.train.adam.lr)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_sage->add_option("--weight-decay", sage.train.adam.weight_decay)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c_sage->add_option("--dropout", sage.train.dropout)
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
  c_sage->add_option("--patience", sage.train.patience, "Early stopping; negative disables")
      ->capture_default_str();

  // fit-head
  HeadOptions head;
  auto *c_head = app.add_subcommand("fit-head", "Logistic head on the train rows");
  add_common(c_head, common, false);
  path_opt(c_head, "--manifest", head.manifest, "Manifest (default <workdir>/manifest.csv)");
  c_head->add_option("--features", head.features,
                     "Feature files, concatenated (default <workdir>/ggs.fmat)");
  path_opt(c_head, "--out", head.out, "Model (default <workdir>/head.gprm)");
  c_head->add_option("--l2", head.l2)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_head->add_option("--max-iter", head.solver.max_iter)->capture_default_str();
  c_head->add_option("--tol", head.solver.tol)->check(CLI::PositiveNumber)->capture_default_str();

  // evaluate
  EvaluateOptions ev;
  auto *c_ev = app.add_subcommand("evaluate", "Metrics of a logistic head or a SAGE model");
  add_common(c_ev, common, false);
  path_opt(c_ev, "--manifest", ev.manifest, "Manifest (default <workdir>/manifest.csv)");
  c_ev->add_option("--features", ev.features,
                   "Feature files, concatenated (default <workdir>/ggs.fmat)");
  path_opt(c_ev, "--model", ev.model, "Logistic head (default <workdir>/head.gprm)");
  auto *sage_opt = path_opt(c_ev, "--sage", ev.sage, "Evaluate this SAGE model instead");
  path_opt(c_ev, "--metagraph", ev.metagraph, "Meta-graph for --sage (default <workdir>/metagraph)")
      ->needs(sage_opt);
  path_opt(c_ev, "--out", ev.out, "Metrics CSV (default <workdir>/metrics.csv)");
  c_ev->add_option("--split", ev.split, "Rows to score")
      ->check(CLI::IsMember({ "train", "val", "test", "all" }))
      ->capture_default_str();
  c_ev->add_option("--threshold", ev.threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();

  // cv
  CvOptions cv;
  auto *c_cv = app.add_subcommand("cv", "Stratified k-fold cross-validation of the logistic head");
  add_common(c_cv, common, true);
  path_opt(c_cv, "--manifest", cv.manifest, "Manifest (default <workdir>/manifest.csv)");
  c_cv->add_option("--features", cv.features,
                   "Feature files, concatenated (default <workdir>/ggs.fmat)");
  path_opt(c_cv, "--out", cv.out, "Report CSV (default <workdir>/cv.csv)");
  c_cv->add_option("--k", cv.k, "Folds")->check(CLI::Range(2, 1000000))->capture_default_str();
  c_cv->add_option("--split", cv.split, "Rows to cross-validate")
      ->check(CLI::IsMember({ "train", "all" }))
      ->capture_default_str();
  c_cv->add_option("--l2", cv.head.l2)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_cv->add_option("--max-iter", cv.head.solver.max_iter)->capture_default_str();
  c_cv->add_option("--threshold", cv.head.threshold)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    report_error("ConfigError", e.what());
    return 2;
  }

  CLI::App *sub = app.get_subcommands().front();
  common.config_text = sub->config_to_str(true, false);
  const std::string name = sub->get_name();
  try {
    std::filesystem::create_directories(common.workdir);
    if (name == "ingest") {
      run_ingest(common, ingest);
    } else if (name == "featurize-gst") {
      run_featurize_gst(common, gst);
    } else if (name == "featurize-2d") {
      run_featurize_2d(common, s2d);
    } else if (name == "train-gin") {
      run_train_gin(common, gin);
    } else if (name == "export-embeddings") {
      run_export_embeddings(common, embed);
    } else if (name == "build-metagraph") {
      run_build_metagraph(common, mg);
    } else if (name == "train-sage") {
      run_train_sage(common, sage);
    } else if (name == "fit-head") {
      run_fit_head(common, head);
    } else if (name == "evaluate") {
      run_evaluate(common, ev);
    } else if (name == "cv") {
      run_cv(common, cv);
    }
  } catch (const Error &e) {
    report_error(std::string(error_code_name(e.code())), e.what());
    return e.code() == ErrorCode::kConfigError ? 2 : 1;
  } catch (const std::filesystem::filesystem_error &e) {
    report_error("IoError", e.what());
    return 1;
  }
  return 0;
}
