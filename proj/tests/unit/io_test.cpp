// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

#include "geoscatt/common/error.hpp"
#include "geoscatt/io/csv.hpp"
#include "geoscatt/io/formats.hpp"

namespace geoscatt {
namespace {

namespace fs = std::filesystem;

std::vector<unsigned char> slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), {} };
}

void spit(const fs::path &p, const std::vector<unsigned char> &bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void append_u32(std::vector<unsigned char> &b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    b.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
}

void append_f64(std::vector<unsigned char> &b, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) {
    b.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
}

class IoTest : public ::testing::Test {
 protected:
  fs::path dir_ = fs::temp_directory_path() / "geoscatt_io_test";
  void SetUp() override { fs::create_directories(dir_); }
  void TearDown() override { fs::remove_all(dir_); }
};

TEST_F(IoTest, FmatByteLayout) {
  const Matrix m(2, 3, { 1.0, -2.5, 0.0, 1e-300, 3.25, -0.0 });
  write_fmat(dir_ / "m.fmat", m);
  std::vector<unsigned char> expected { 'F', 'M', 'A', 'T', 1 };
  append_u32(expected, 2);
  append_u32(expected, 3);
  for (double v: m.data()) {
    append_f64(expected, v);
  }
  EXPECT_EQ(slurp(dir_ / "m.fmat"), expected);
  const Matrix back = read_fmat(dir_ / "m.fmat");
  EXPECT_EQ(back, m);
  EXPECT_TRUE(std::signbit(back(1, 2)));
}

TEST_F(IoTest, FmatRejectsDamage) {
  write_fmat(dir_ / "m.fmat", Matrix(3, 3, 1.0));
  auto bytes = slurp(dir_ / "m.fmat");

  auto truncated = bytes;
  truncated.pop_back();
  spit(dir_ / "t.fmat", truncated);
  EXPECT_THROW((void) read_fmat(dir_ / "t.fmat"), Error);

  auto trailing = bytes;
  trailing.push_back(0);
  spit(dir_ / "x.fmat", trailing);
  EXPECT_THROW((void) read_fmat(dir_ / "x.fmat"), Error);

  auto magic = bytes;
  magic[0] = 'G';
  spit(dir_ / "g.fmat", magic);
  try {
    (void) read_fmat(dir_ / "g.fmat");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }

  auto version = bytes;
  version[4] = 2;
  spit(dir_ / "v.fmat", version);
  EXPECT_THROW((void) read_fmat(dir_ / "v.fmat"), Error);

  try {
    (void) read_fmat(dir_ / "missing.fmat");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST_F(IoTest, GprmLayoutAndShapes) {
  Tensor a("a", { 2, 2 });
  a.values = { 1, 2, 3, 4 };
  Tensor b("b", { 3 });
  b.values = { -1, 0.5, 8 };
  write_tensors(dir_ / "p.gprm", { a, b });

  std::vector<unsigned char> expected { 'G', 'P', 'R', 'M', 1 };
  append_u32(expected, 2);
  append_u32(expected, 2);
  append_u32(expected, 2);
  append_u32(expected, 2);
  for (double v: a.values) {
    append_f64(expected, v);
  }
  append_u32(expected, 1);
  append_u32(expected, 3);
  for (double v: b.values) {
    append_f64(expected, v);
  }
  EXPECT_EQ(slurp(dir_ / "p.gprm"), expected);

  TensorList shapes { Tensor("a", { 2, 2 }), Tensor("b", { 3 }) };
  const TensorList back = read_tensors(dir_ / "p.gprm", shapes);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);

  const TensorList raw = read_tensors(dir_ / "p.gprm");
  ASSERT_EQ(raw.size(), 2U);
  EXPECT_EQ(raw[0].shape, a.shape);
  EXPECT_EQ(raw[1].values, b.values);
  EXPECT_TRUE(raw[0].name.empty());

  try {
    (void) read_tensors(dir_ / "p.gprm", { Tensor("a", { 2, 2 }), Tensor("b", { 4 }) });
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW((void) read_tensors(dir_ / "p.gprm", { Tensor("a", { 2, 2 }) }), Error);
}

TEST_F(IoTest, FeatureCsvRoundTrip) {
  const Matrix m(3, 2, { 0.1, 1.0 / 3.0, -1e-17, 12345678.9, 2.0, -0.5 });
  const std::vector<std::string> cols { "plain", "with,comma" };
  write_features(dir_ / "f.csv", m, cols);
  std::vector<std::string> names;
  const Matrix back = read_feature_csv(dir_ / "f.csv", &names);
  EXPECT_EQ(back, m);
  EXPECT_EQ(names, cols);
  EXPECT_EQ(read_features(dir_ / "f.csv"), m);

  write_features(dir_ / "f.fmat", m, cols);
  EXPECT_EQ(read_features(dir_ / "f.fmat"), m);

  EXPECT_THROW(write_feature_csv(dir_ / "bad.csv", m, { "one" }), Error);
  std::ofstream(dir_ / "ragged.csv") << "a,b\n1,2\n3\n";
  EXPECT_THROW((void) read_feature_csv(dir_ / "ragged.csv"), Error);
  std::ofstream(dir_ / "text.csv") << "a\nabc\n";
  EXPECT_THROW((void) read_feature_csv(dir_ / "text.csv"), Error);
}

TEST(CsvTest, SplitAndEscape) {
  EXPECT_EQ(split_csv_line("a,b,,c"), (std::vector<std::string> { "a", "b", "", "c" }));
  EXPECT_EQ(split_csv_line("\"x,y\",\"say \"\"hi\"\"\"\r"),
            (std::vector<std::string> { "x,y", "say \"hi\"" }));
  EXPECT_EQ(split_csv_line("a;b", ';'), (std::vector<std::string> { "a", "b" }));
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("q\""), "\"q\"\"\"");
  EXPECT_EQ(split_csv_line(csv_escape("C(=O)\"x\",y")),
            (std::vector<std::string> { "C(=O)\"x\",y" }));
  EXPECT_EQ(trim("  x \t"), "x");
}

TEST(HconcatTest, JoinsBlocks) {
  const Matrix a(2, 1, { 1, 2 }), b(2, 2, { 3, 4, 5, 6 });
  EXPECT_EQ(hconcat({ a, b }), Matrix(2, 3, { 1, 3, 4, 2, 5, 6 }));
  EXPECT_THROW((void) hconcat({ a, Matrix(3, 1) }), Error);
}

}  // namespace
}  // namespace geoscatt
