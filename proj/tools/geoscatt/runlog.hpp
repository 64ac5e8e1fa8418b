// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace geoscatt::cli {

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string &bytes);
std::string file_sha256(const std::filesystem::path &path);

/// JSON record written next to every artifact set:
/// <workdir>/logs/<command>.<first output file name>.json.
class RunLog {
 public:
  RunLog(std::string command, std::string config_text);

  void seed(std::uint64_t seed) { seed_ = seed; }
  void threads(unsigned threads) { threads_ = threads; }
  void input(const std::string &role, const std::filesystem::path &path);
  void output(const std::string &role, const std::filesystem::path &path);
  void note(const std::string &key, const std::string &value);

  void write(const std::filesystem::path &workdir) const;

 private:
  struct File {
    std::string role;
    std::filesystem::path path;
  };
  std::string command_;
  std::string config_text_;
  std::optional<std::uint64_t> seed_;
  unsigned threads_ = 1;
  std::vector<File> inputs_;
  std::vector<File> outputs_;
  std::vector<std::pair<std::string, std::string>> notes_;
};

}  // namespace geoscatt::cli
