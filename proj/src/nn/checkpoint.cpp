// SPDX-FileCopyrightText: Copyright (c) 2026 The molseq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "molseq/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>

#include "molseq/error.hpp"

namespace molseq::nn {

namespace {

constexpr std::string_view kMagic = "MOLSEQCK";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw domain_error("checkpoint truncated at byte " + std::to_string(pos_));
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Mat<float>* Checkpoint::find(std::string_view name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

const std::string& Checkpoint::require(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw domain_error("checkpoint lacks metadata key " + key);
  return it->second;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic);
  put_u32(out, kCheckpointVersion);
  const std::string meta = util::format_key_values(ckpt.meta);
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(t.rows()));
    put_u32(out, static_cast<std::uint32_t>(t.cols()));
    for (Eigen::Index i = 0; i < t.size(); ++i) put_u32(out, std::bit_cast<std::uint32_t>(t.data()[i]));
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kMagic.size()) != kMagic) throw domain_error("not a molseq checkpoint (bad magic)");
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw domain_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.meta = util::parse_key_values(r.take(r.u32()));
  const auto count = r.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name(r.take(r.u32()));
    const auto rank = r.u32();
    if (rank != 2) throw domain_error("tensor " + name + " has unsupported rank " + std::to_string(rank));
    const auto rows = r.u32();
    const auto cols = r.u32();
    if (static_cast<std::uint64_t>(rows) * cols * 4 > bytes.size()) throw domain_error("tensor " + name + " larger than file");
    Mat<float> t(rows, cols);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = std::bit_cast<float>(r.u32());
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (!r.at_end()) throw domain_error("trailing bytes after checkpoint tensors");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  // Write-then-rename so an interrupted save never leaves a torn file.
  const std::string tmp = path + ".tmp";
  util::write_file(tmp, serialize_checkpoint(ckpt));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
  return parse_checkpoint(util::read_file(path));
}

}  // namespace molseq::nn
