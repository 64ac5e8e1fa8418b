// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geoscatt/common/matrix.hpp"
#include "geoscatt/common/tensor.hpp"

namespace geoscatt {

/// "FMAT", u8 version (1), u32 rows, u32 cols, then rows*cols float64,
/// row-major, little-endian.
void write_fmat(const std::filesystem::path &path, const Matrix &m);
Matrix read_fmat(const std::filesystem::path &path);

/// Header row of column names, then one row per record. Values use the
/// shortest round-trip representation.
void write_feature_csv(const std::filesystem::path &path, const Matrix &m,
                       const std::vector<std::string> &columns);
Matrix read_feature_csv(const std::filesystem::path &path,
                        std::vector<std::string> *columns = nullptr);

/// Picks FMAT or CSV by extension (.fmat / .csv).
void write_features(const std::filesystem::path &path, const Matrix &m,
                    const std::vector<std::string> &columns);
Matrix read_features(const std::filesystem::path &path);

/// Row-wise concatenation of column blocks; all blocks need equal rows.
Matrix hconcat(const std::vector<Matrix> &blocks);

/// "GPRM", u8 version (1), u32 tensor count, then per tensor u32 ndim,
/// ndim x u32 dims and the float64 values, little-endian, in list order.
void write_tensors(const std::filesystem::path &path, const TensorList &tensors);
/// Reads a GPRM file whose tensors must match the names' shapes in
/// expected (FormatError / ShapeMismatch otherwise). Values are replaced.
TensorList read_tensors(const std::filesystem::path &path, TensorList expected);
/// Reads every tensor as stored; names are left empty.
TensorList read_tensors(const std::filesystem::path &path);

}  // namespace geoscatt
