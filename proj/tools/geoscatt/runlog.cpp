// SPDX-License-Identifier: Apache-2.0
#include "runlog.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "geoscatt/common/error.hpp"
#include "geoscatt/simd/kernels.hpp"

namespace geoscatt::cli {

std::string sha256_hex(const std::string &bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::string file_sha256(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

RunLog::RunLog(std::string command, std::string config_text)
    : command_(std::move(command)), config_text_(std::move(config_text)) { }

void RunLog::input(const std::string &role, const std::filesystem::path &path) {
  inputs_.push_back({ role, path });
}

void RunLog::output(const std::string &role, const std::filesystem::path &path) {
  outputs_.push_back({ role, path });
}

void RunLog::note(const std::string &key, const std::string &value) {
  notes_.emplace_back(key, value);
}

void RunLog::write(const std::filesystem::path &workdir) const {
  using nlohmann::ordered_json;
  auto files = [](const std::vector<File> &list) {
    ordered_json arr = ordered_json::array();
    for (const auto &f: list) {
      ordered_json entry { { "role", f.role }, { "path", f.path.string() } };
      // Directories (the meta-graph) are listed without a digest.
      if (std::filesystem::is_regular_file(f.path)) {
        entry["sha256"] = file_sha256(f.path);
      }
      arr.push_back(std::move(entry));
    }
    return arr;
  };
  ordered_json log;
  log["command"] = command_;
  log["version"] = GEOSCATT_VERSION;
  log["config_sha256"] = sha256_hex(config_text_);
  log["config"] = config_text_;
  log["seed"] = seed_ ? ordered_json(*seed_) : ordered_json(nullptr);
  log["threads"] = threads_;
  log["simd"] = std::string(simd::backend_name(simd::active_backend()));
  log["inputs"] = files(inputs_);
  log["outputs"] = files(outputs_);
  for (const auto &[k, v]: notes_) {
    log["notes"][k] = v;
  }

  const auto dir = workdir / "logs";
  std::filesystem::create_directories(dir);
  // Keyed by the first output too, so two runs of one command with
  // different outputs keep separate logs.
  std::string name = command_;
  if (!outputs_.empty()) {
    name += "." + outputs_.front().path.filename().string();
  }
  std::ofstream out(dir / (name + ".json"));
  out << log.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write run-log in " + dir.string());
  }
}

}  // namespace geoscatt::cli
