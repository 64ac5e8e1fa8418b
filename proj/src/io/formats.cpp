// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/io/formats.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

#include "geoscatt/common/error.hpp"
#include "geoscatt/io/csv.hpp"

namespace geoscatt {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

constexpr std::uint8_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path &path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) {
      throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    }
  }

  void bytes(const void *p, std::size_t n) {
    out_.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void f64s(std::span<const double> v) { bytes(v.data(), v.size() * sizeof(double)); }

  void finish() {
    out_.flush();
    if (!out_) {
      throw Error(ErrorCode::kIoError, "write failed for " + path_.string());
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path &path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) {
      throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    }
  }

  void bytes(void *p, std::size_t n) {
    in_.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw Error(ErrorCode::kFormatError, path_.string() + " is truncated");
    }
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  void f64s(std::span<double> v) { bytes(v.data(), v.size() * sizeof(double)); }

  void magic(const char (&expected)[5]) {
    char m[4];
    bytes(m, 4);
    if (std::memcmp(m, expected, 4) != 0) {
      throw Error(ErrorCode::kFormatError,
                  path_.string() + ": expected " + expected + " header");
    }
    if (const auto v = u8(); v != kVersion) {
      throw Error(ErrorCode::kFormatError,
                  path_.string() + ": unsupported version " + std::to_string(v));
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kFormatError, path_.string() + " has trailing bytes");
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::uint32_t checked_u32(std::size_t v) {
  if (v > UINT32_MAX) {
    throw Error(ErrorCode::kFormatError, "dimension exceeds u32");
  }
  return static_cast<std::uint32_t>(v);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_fmat(const std::filesystem::path &path, const Matrix &m) {
  Writer w(path);
  w.bytes("FMAT", 4);
  w.u8(kVersion);
  w.u32(checked_u32(m.rows()));
  w.u32(checked_u32(m.cols()));
  w.f64s(m.data());
  w.finish();
}

Matrix read_fmat(const std::filesystem::path &path) {
  Reader r(path);
  r.magic("FMAT");
  const std::size_t rows = r.u32(), cols = r.u32();
  Matrix m(rows, cols);
  r.f64s(m.data());
  r.expect_end();
  return m;
}

void write_feature_csv(const std::filesystem::path &path, const Matrix &m,
                       const std::vector<std::string> &columns) {
  if (columns.size() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "column names do not match matrix");
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << csv_escape(columns[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

Matrix read_feature_csv(const std::filesystem::path &path,
                        std::vector<std::string> *columns) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormatError, path.string() + " is empty");
  }
  const auto header = split_csv_line(line);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kFormatError,
                  path.string() + ": row " + std::to_string(rows + 1) +
                      " has the wrong number of fields");
    }
    for (const auto &f: fields) {
      const auto t = trim(f);
      double v = 0.0;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw Error(ErrorCode::kFormatError,
                    path.string() + ": '" + std::string(t) + "' is not a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (columns != nullptr) {
    *columns = header;
  }
  return Matrix(rows, header.size(), std::move(values));
}

void write_features(const std::filesystem::path &path, const Matrix &m,
                    const std::vector<std::string> &columns) {
  if (path.extension() == ".csv") {
    write_feature_csv(path, m, columns);
  } else {
    write_fmat(path, m);
  }
}

Matrix read_features(const std::filesystem::path &path) {
  return path.extension() == ".csv" ? read_feature_csv(path) : read_fmat(path);
}

Matrix hconcat(const std::vector<Matrix> &blocks) {
  if (blocks.empty()) {
    return {};
  }
  std::size_t cols = 0;
  for (const auto &b: blocks) {
    if (b.rows() != blocks[0].rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "feature blocks have different row counts");
    }
    cols += b.cols();
  }
  Matrix out(blocks[0].rows(), cols);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::size_t offset = 0;
    for (const auto &b: blocks) {
      std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + offset);
      offset += b.cols();
    }
  }
  return out;
}

void write_tensors(const std::filesystem::path &path, const TensorList &tensors) {
  Writer w(path);
  w.bytes("GPRM", 4);
  w.u8(kVersion);
  w.u32(checked_u32(tensors.size()));
  for (const auto &t: tensors) {
    w.u32(checked_u32(t.shape.size()));
    for (auto d: t.shape) {
      w.u32(d);
    }
    w.f64s(t.values);
  }
  w.finish();
}

TensorList read_tensors(const std::filesystem::path &path, TensorList expected) {
  Reader r(path);
  r.magic("GPRM");
  if (r.u32() != expected.size()) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": wrong tensor count for this model");
  }
  for (auto &t: expected) {
    const std::uint32_t ndim = r.u32();
    std::vector<std::uint32_t> shape(ndim);
    for (auto &d: shape) {
      d = r.u32();
    }
    if (shape != t.shape) {
      throw Error(ErrorCode::kShapeMismatch,
                  path.string() + ": tensor '" + t.name + "' has the wrong shape");
    }
    r.f64s(t.values);
  }
  r.expect_end();
  return expected;
}

TensorList read_tensors(const std::filesystem::path &path) {
  Reader r(path);
  r.magic("GPRM");
  const std::uint32_t count = r.u32();
  TensorList out;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t ndim = r.u32();
    std::vector<std::uint32_t> shape(ndim);
    for (auto &d: shape) {
      d = r.u32();
    }
    out.emplace_back("", std::move(shape));
    r.f64s(out.back().values);
  }
  r.expect_end();
  return out;
}

}  // namespace geoscatt
