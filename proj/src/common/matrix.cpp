// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/common/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "geoscatt/common/error.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix data length does not match its shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix transpose(const Matrix &a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

Matrix matmul(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matmul: inner dimensions differ");
  }
  const auto &k = simd::kernels();
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double *ci = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip != 0.0) {
        k.axpy(aip, b.row(p).data(), ci, b.cols());
      }
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matmul_nt: column counts differ");
  }
  Matrix c(a.rows(), b.rows());
  simd::kernels().gemm_nt(a.data().data(), b.data().data(), c.data().data(),
                          a.rows(), b.rows(), a.cols());
  return c;
}

Matrix matmul_tn(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matmul_tn: row counts differ");
  }
  const auto &k = simd::kernels();
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double *br = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = a(r, i);
      if (ari != 0.0) {
        k.axpy(ari, br, c.row(i).data(), b.cols());
      }
    }
  }
  return c;
}

namespace {

void require_same_shape(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix shapes differ");
  }
}

}  // namespace

Matrix operator+(const Matrix &a, const Matrix &b) {
  require_same_shape(a, b);
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.data()[i] += b.data()[i];
  }
  return c;
}

Matrix operator-(const Matrix &a, const Matrix &b) {
  require_same_shape(a, b);
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.data()[i] -= b.data()[i];
  }
  return c;
}

Matrix operator*(double s, const Matrix &a) {
  Matrix c = a;
  for (double &v: c.data()) {
    v *= s;
  }
  return c;
}

double frobenius_norm(const Matrix &a) {
  double s = 0.0;
  for (double v: a.data()) {
    s += v * v;
  }
  return std::sqrt(s);
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

std::vector<double> column_means(const Matrix &a) {
  std::vector<double> mean(a.cols(), 0.0);
  if (a.rows() == 0) {
    return mean;
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      mean[j] += a(i, j);
    }
  }
  for (double &m: mean) {
    m /= static_cast<double>(a.rows());
  }
  return mean;
}

Matrix select_rows(const Matrix &a, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "row index out of range");
    }
    std::copy(a.row(rows[i]).begin(), a.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

}  // namespace geoscatt
