// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tfev/signal/waveform.hpp"

namespace tfev::signal {

// RIFF/WAVE, PCM16 only. Stereo input is downmixed by channel mean and samples
// are scaled by 1/32768.
Waveform load_wav(const std::filesystem::path& path);
Waveform decode_wav(std::span<const std::uint8_t> bytes);

// Mono PCM16 writer; values are rounded to the nearest code and clipped to [-32768, 32767].
void write_wav(const Waveform& wave, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(const Waveform& wave);

}  // namespace tfev::signal
