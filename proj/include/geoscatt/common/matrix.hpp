// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace geoscatt {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) { }
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return { data_.data() + r * cols_, cols_ };
  }
  std::span<const double> row(std::size_t r) const {
    return { data_.data() + r * cols_, cols_ };
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double> &values() const noexcept { return data_; }

  bool operator==(const Matrix &) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix &a);

/// A * B
Matrix matmul(const Matrix &a, const Matrix &b);
/// A * B^T
Matrix matmul_nt(const Matrix &a, const Matrix &b);
/// A^T * B
Matrix matmul_tn(const Matrix &a, const Matrix &b);

Matrix operator+(const Matrix &a, const Matrix &b);
Matrix operator-(const Matrix &a, const Matrix &b);
Matrix operator*(double s, const Matrix &a);

double frobenius_norm(const Matrix &a);
double max_abs_diff(const Matrix &a, const Matrix &b);

/// Column-wise mean over rows.
std::vector<double> column_means(const Matrix &a);

/// Rows of a in the given order.
Matrix select_rows(const Matrix &a, std::span<const std::size_t> rows);

}  // namespace geoscatt
