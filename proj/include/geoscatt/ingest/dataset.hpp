// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geoscatt/ingest/molecule.hpp"
#include "geoscatt/ingest/preprocess.hpp"
#include "geoscatt/ingest/smiles.hpp"

namespace geoscatt {

struct DatasetRecord {
  std::string smiles_text;
  std::string canonical_key;
  int label = 0;
  MolecularGraph graph;
};

struct LabeledSmiles {
  std::string smiles;
  int label = 0;
};

/// Reads a `smiles,label` file (tab-separated also accepted). Columns are
/// found by header name.
std::vector<LabeledSmiles> read_labeled_smiles(const std::filesystem::path &path);

struct IngestReport {
  std::size_t input_rows = 0;
  std::size_t parsed = 0;
  std::size_t after_dedup = 0;
  std::size_t positives = 0;
  /// Error category name -> count of dropped rows.
  std::map<std::string, std::size_t> dropped;
};

/// Parses and preprocesses each row (in parallel, order preserved). Rows
/// that fail are dropped and counted in report.
std::vector<DatasetRecord> build_records(const std::vector<LabeledSmiles> &rows,
                                         unsigned threads, IngestReport *report,
                                         const SmilesOptions &parse_options = {},
                                         const PreprocessOptions &prep_options = {});

/// One record per canonical key in first-occurrence order. A key seen with
/// label 1 anywhere survives with label 1.
std::vector<DatasetRecord> dedup_clear_evidence(std::vector<DatasetRecord> records);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Label-stratified split over record indices; each class contributes
/// round(count * test_fraction) records to test. Throws DegenerateSplit if
/// any class would leave either side empty.
Split split_dataset(const std::vector<int> &labels, double test_fraction,
                    std::uint64_t seed);

struct ManifestRow {
  std::string canonical_key;
  int label = 0;
  std::string split;
};

void write_manifest(const std::filesystem::path &path,
                    const std::vector<ManifestRow> &rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path &path);

}  // namespace geoscatt
