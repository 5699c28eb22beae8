// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/signal/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tfev/error.hpp"

namespace tfev::signal {
namespace {

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t off, const char* tag) {
  return std::memcmp(b.data() + off, tag, 4) == 0;
}

constexpr std::uint16_t kFormatPcm = 1;

}  // namespace

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw DataError("wav: file too short for RIFF header");
  if (!tag_is(bytes, 0, "RIFF")) throw DataError("wav: unsupported container (magic is not RIFF)");
  if (!tag_is(bytes, 8, "WAVE")) throw DataError("wav: unsupported container (form type is not WAVE)");

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || body + 16 > bytes.size()) throw DataError("wav: fmt chunk truncated");
      const std::uint16_t format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != kFormatPcm) {
        throw DataError("wav: unsupported codec (format tag " + std::to_string(format) + ", only PCM=1)");
      }
      if (bits != 16) throw DataError("wav: unsupported bit depth (bits_per_sample " + std::to_string(bits) + ")");
      if (channels != 1 && channels != 2) {
        throw DataError("wav: unsupported channel count (channels " + std::to_string(channels) + ")");
      }
      if (sample_rate == 0) throw DataError("wav: sample_rate is zero");
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw DataError("wav: data chunk precedes fmt chunk");
      const std::size_t available = std::min<std::size_t>(chunk_size, bytes.size() - body);
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t frames = available / frame_bytes;
      if (frames == 0) throw DataError("wav: data chunk holds no samples");
      std::vector<double> samples(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + f * frame_bytes + 2u * c));
          acc += static_cast<double>(raw) / 32768.0;
        }
        samples[f] = acc / channels;
      }
      return Waveform(std::move(samples), sample_rate);
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_fmt) throw DataError("wav: missing fmt chunk");
  throw DataError("wav: missing data chunk");
}

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " [" + path.string() + "]");
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& wave) {
  const auto samples = wave.samples();
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, wave.sample_rate());
  put_u32(out, wave.sample_rate() * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double s : samples) {
    const double code = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }
  return out;
}

void write_wav(const Waveform& wave, const std::filesystem::path& path) {
  const auto bytes = encode_wav(wave);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("wav: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("wav: short write to " + path.string());
}

}  // namespace tfev::signal
