// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/ingest/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <unordered_map>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/common/rng.hpp"
#include "geoscatt/ingest/canonical.hpp"
#include "geoscatt/io/csv.hpp"

namespace geoscatt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &c: out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

int parse_label(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text == "0" || text == "0.0") {
    return 0;
  }
  if (text == "1" || text == "1.0") {
    return 1;
  }
  throw Error(ErrorCode::kFormatError, "line " + std::to_string(line) +
                                           ": label must be 0 or 1, got '" +
                                           std::string(text) + "'");
}

}  // namespace

std::vector<LabeledSmiles> read_labeled_smiles(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormatError, path.string() + " is empty");
  }
  const char delim = line.find('\t') != std::string::npos &&
                             line.find(',') == std::string::npos
                       ? '\t'
                       : ',';
  const auto header = split_csv_line(line, delim);
  std::optional<std::size_t> smiles_col, label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = lower(trim(header[c]));
    if (name == "smiles" && !smiles_col) {
      smiles_col = c;
    } else if (name == "label" && !label_col) {
      label_col = c;
    }
  }
  if (!smiles_col || !label_col) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": header needs 'smiles' and 'label' columns");
  }

  std::vector<LabeledSmiles> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_line(line, delim);
    if (fields.size() <= std::max(*smiles_col, *label_col)) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(line_no) + ": too few columns");
    }
    rows.push_back({ std::string(trim(fields[*smiles_col])),
                     parse_label(fields[*label_col], line_no) });
  }
  return rows;
}

std::vector<DatasetRecord> build_records(const std::vector<LabeledSmiles> &rows,
                                         unsigned threads, IngestReport *report,
                                         const SmilesOptions &parse_options,
                                         const PreprocessOptions &prep_options) {
  std::vector<std::optional<DatasetRecord>> slots(rows.size());
  std::vector<std::string> failures(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    try {
      MolecularGraph g = preprocess(parse_smiles(rows[i].smiles, parse_options),
                                    prep_options);
      g.label = rows[i].label;
      DatasetRecord rec;
      rec.smiles_text = rows[i].smiles;
      rec.canonical_key = canonical_key(g);
      rec.label = rows[i].label;
      rec.graph = std::move(g);
      slots[i] = std::move(rec);
    } catch (const Error &e) {
      failures[i] = std::string(error_code_name(e.code()));
    }
  });

  std::vector<DatasetRecord> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (slots[i]) {
      out.push_back(std::move(*slots[i]));
    } else if (report != nullptr) {
      ++report->dropped[failures[i]];
    }
  }
  if (report != nullptr) {
    report->input_rows = rows.size();
    report->parsed = out.size();
  }
  return out;
}

std::vector<DatasetRecord> dedup_clear_evidence(std::vector<DatasetRecord> records) {
  std::unordered_map<std::string, std::size_t> first;
  std::vector<DatasetRecord> out;
  for (auto &rec: records) {
    auto [it, inserted] = first.try_emplace(rec.canonical_key, out.size());
    if (inserted) {
      out.push_back(std::move(rec));
      continue;
    }
    DatasetRecord &kept = out[it->second];
    if (rec.label == 1) {
      kept.label = 1;
      kept.graph.label = 1;
    }
  }
  return out;
}

Split split_dataset(const std::vector<int> &labels, double test_fraction,
                    std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kConfigError, "test fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  Split split;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) {
        members.push_back(i);
      }
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * test_fraction));
    if (n_test == 0 || n_test >= members.size()) {
      throw Error(ErrorCode::kDegenerateSplit,
                  "class " + std::to_string(cls) + " with " +
                      std::to_string(members.size()) +
                      " records cannot populate both sides");
    }
    rng.shuffle(std::span<std::size_t>(members));
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void write_manifest(const std::filesystem::path &path,
                    const std::vector<ManifestRow> &rows) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << "canonical_key,label,split\n";
  for (const auto &r: rows) {
    out << csv_escape(r.canonical_key) << ',' << r.label << ',' << r.split << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) !=
          std::vector<std::string> { "canonical_key", "label", "split" }) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": expected header canonical_key,label,split");
  }
  std::vector<ManifestRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 3 || (fields[2] != "train" && fields[2] != "test")) {
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": bad manifest line " + std::to_string(line_no));
    }
    rows.push_back({ fields[0], parse_label(fields[1], line_no), fields[2] });
  }
  return rows;
}

}  // namespace geoscatt
