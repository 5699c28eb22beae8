// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfev/model/params.hpp"

namespace tfev::model {

// Layout (little-endian):
//   "TFEVCKPT" | u32 version | u32 n | n bytes of JSON {"model": config, "meta": ...}
//   | u32 tensor count | per tensor: u16 name length, name, u32 rows, u32 cols, rows*cols f32 row-major
// Values are stored as float32, so a save/load cycle rounds parameters to float.

struct Checkpoint {
  Params params;
  nlohmann::json meta;
};

std::vector<std::uint8_t> encode_checkpoint(const Params& params, const nlohmann::json& meta = nlohmann::json::object());
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Params& params, const std::filesystem::path& path,
                     const nlohmann::json& meta = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// SHA-256 of the encoded checkpoint.
std::string checkpoint_digest(const Params& params);

}  // namespace tfev::model
