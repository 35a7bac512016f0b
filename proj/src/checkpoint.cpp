// Copyright 2026 The cfh Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfh/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "cfh/config_json.hpp"

namespace cfh {

namespace {

constexpr char kMagic[8] = {'C', 'F', 'H', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data(), kMagic, sizeof(kMagic)) != 0) throw InvalidInput("checkpoint: bad magic");
    pos_ += sizeof(kMagic);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw InvalidInput("checkpoint: truncated file");
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

void write_section(Writer& w, const std::string& name, const ModelParameters<float>& p) {
  w.str(name);
  const auto tensors = tensor_list(p);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [tname, t] : tensors) {
    w.str(tname);
    w.u32(static_cast<std::uint32_t>(t->rows()));
    w.u32(static_cast<std::uint32_t>(t->cols()));
    for (Eigen::Index r = 0; r < t->rows(); ++r) {
      for (Eigen::Index c = 0; c < t->cols(); ++c) w.f32((*t)(r, c));
    }
  }
}

ModelParameters<float> read_section(Reader& r, const ModelConfig& cfg) {
  ModelParameters<float> p = zero_parameters<float>(cfg);
  auto tensors = tensor_list(p);
  const std::uint32_t count = r.u32();
  if (count != tensors.size()) throw InvalidInput("checkpoint: tensor count does not match the config");
  for (auto& [expected, t] : tensors) {
    const std::string name = r.str();
    if (name != expected) throw InvalidInput("checkpoint: expected tensor " + expected + ", found " + name);
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != t->rows() || cols != t->cols()) throw InvalidInput("checkpoint: shape mismatch for " + name);
    for (Eigen::Index i = 0; i < t->rows(); ++i) {
      for (Eigen::Index j = 0; j < t->cols(); ++j) (*t)(i, j) = r.f32();
    }
  }
  return p;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  const nlohmann::json header{{"config", to_json(ckpt.live.config)}, {"metadata", ckpt.metadata}};
  w.str(header.dump());
  w.u32(ckpt.ema ? 2 : 1);
  write_section(w, "live", ckpt.live);
  if (ckpt.ema) write_section(w, "ema", *ckpt.ema);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("load_checkpoint: cannot open " + path);
  Reader r(std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
  r.expect_magic();
  if (r.u32() != kVersion) throw InvalidInput("load_checkpoint: unsupported version");
  const nlohmann::json header = nlohmann::json::parse(r.str());
  const ModelConfig cfg = model_config_from_json(header.at("config"));
  cfg.validate();

  Checkpoint ckpt;
  ckpt.metadata = header.value("metadata", nlohmann::json::object());
  const std::uint32_t sections = r.u32();
  bool have_live = false;
  for (std::uint32_t s = 0; s < sections; ++s) {
    const std::string name = r.str();
    if (name == "live") {
      ckpt.live = read_section(r, cfg);
      have_live = true;
    } else if (name == "ema") {
      ckpt.ema = read_section(r, cfg);
    } else {
      throw InvalidInput("load_checkpoint: unknown section " + name);
    }
  }
  if (!have_live) throw InvalidInput("load_checkpoint: missing live section");
  if (!r.done()) throw InvalidInput("load_checkpoint: trailing bytes");
  return ckpt;
}

}  // namespace cfh
