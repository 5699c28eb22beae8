// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "tfev/bytes.hpp"
#include "tfev/digest.hpp"
#include "tfev/error.hpp"

namespace tfev::model {
namespace {

constexpr char kMagic[8] = {'T', 'F', 'E', 'V', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

bool is_lora_name(const std::string& name) { return name.find(".lora_") != std::string::npos; }

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Params& params, const nlohmann::json& meta) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 8));
  w.u32(kVersion);
  const nlohmann::json header = {{"model", params.config}, {"meta", meta}};
  const std::string text = header.dump();
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.text(text);
  std::uint32_t count = 0;
  for_each_tensor(params, [&](const std::string&, const Mat&, TensorInfo) { ++count; });
  w.u32(count);
  for_each_tensor(params, [&](const std::string& name, const Mat& m, TensorInfo) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.text(name);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) w.f32(static_cast<float>(m(r, c)));
    }
  });
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "checkpoint");
  if (std::memcmp(r.take(8).data(), kMagic, 8) != 0) throw DataError("checkpoint: bad magic (expected TFEVCKPT)");
  const auto version = r.u32();
  if (version != kVersion) throw DataError("checkpoint: unsupported version " + std::to_string(version));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.text(r.u32()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }
  Checkpoint ck;
  const auto config = header.at("model").get<ModelConfig>();
  ck.meta = header.value("meta", nlohmann::json::object());

  std::map<std::string, Mat> tensors;
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = r.text(r.u16());
    const auto rows = r.u32();
    const auto cols = r.u32();
    r.need(static_cast<std::size_t>(rows) * cols * 4);
    Mat m(rows, cols);
    for (Eigen::Index y = 0; y < m.rows(); ++y) {
      for (Eigen::Index x = 0; x < m.cols(); ++x) m(y, x) = r.f32();
    }
    tensors.emplace(name, std::move(m));
  }
  if (r.remaining() != 0) throw DataError("checkpoint: trailing bytes after the last tensor");

  ck.params = init_params(config);
  std::size_t used = 0;
  for_each_tensor(ck.params, [&](const std::string& name, Mat& m, TensorInfo) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) {
      // Merged checkpoints carry no adapters.
      if (is_lora_name(name)) {
        m.resize(0, 0);
        return;
      }
      throw DataError("checkpoint: missing tensor '" + name + "'");
    }
    if (it->second.rows() != m.rows() || it->second.cols() != m.cols()) {
      throw DataError("checkpoint: tensor '" + name + "' has shape " + std::to_string(it->second.rows()) + "x" +
                      std::to_string(it->second.cols()) + ", config implies " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
    }
    m = it->second;
    ++used;
  });
  if (used != tensors.size()) throw DataError("checkpoint: contains tensors the config does not define");
  return ck;
}

void save_checkpoint(const Params& params, const std::filesystem::path& path, const nlohmann::json& meta) {
  const auto bytes = encode_checkpoint(params, meta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

std::string checkpoint_digest(const Params& params) { return sha256_hex(encode_checkpoint(params)); }

}  // namespace tfev::model
