// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/features/tfmatrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>

#include "tfev/bytes.hpp"
#include "tfev/error.hpp"

namespace tfev::features {
namespace {

constexpr char kMagic[4] = {'T', 'F', 'M', 'X'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

std::string_view to_string(RepKind kind) {
  switch (kind) {
    case RepKind::Cqt: return "cqt";
    case RepKind::Mel: return "mel";
    case RepKind::Stft: return "stft";
    case RepKind::Lfcc: return "lfcc";
    case RepKind::Mfcc: return "mfcc";
    case RepKind::Cqcc: return "cqcc";
  }
  return "unknown";
}

std::string_view to_string(Scale scale) {
  switch (scale) {
    case Scale::Magnitude: return "magnitude";
    case Scale::Decibel: return "db";
    case Scale::Cepstrum: return "cepstrum";
    case Scale::Normalized: return "normalized";
  }
  return "unknown";
}

RepKind parse_rep_kind(std::string_view name) {
  for (auto k : {RepKind::Cqt, RepKind::Mel, RepKind::Stft, RepKind::Lfcc, RepKind::Mfcc, RepKind::Cqcc}) {
    if (name == to_string(k)) return k;
  }
  throw UsageError("unknown representation '" + std::string(name) + "' (expected mel, stft, lfcc, mfcc, cqcc, cqt)");
}

void TFMatrix::validate() const {
  if (values.size() != rows * cols) throw DataError("tfmatrix: value count does not match rows*cols");
  if (freq_axis.size() != rows) throw DataError("tfmatrix: frequency axis length does not match rows");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError("tfmatrix: non-finite value at row " + std::to_string(i / cols) + ", col " +
                      std::to_string(i % cols));
    }
  }
}

TFMatrix make_tfmatrix(RepKind kind, Scale scale, std::size_t rows, std::size_t cols, std::vector<double> freq_axis,
                       double frame_rate) {
  TFMatrix tf;
  tf.kind = kind;
  tf.scale = scale;
  tf.rows = rows;
  tf.cols = cols;
  tf.values.assign(rows * cols, 0.0f);
  tf.freq_axis = std::move(freq_axis);
  tf.frame_rate = frame_rate;
  return tf;
}

std::vector<std::uint8_t> encode_tfmatrix(const TFMatrix& tf) {
  tf.validate();
  std::vector<std::uint8_t> out;
  out.reserve(20 + 4 * (tf.rows + tf.values.size()));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  ByteWriter w(out);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(tf.kind));
  w.u8(static_cast<std::uint8_t>(tf.scale));
  w.u32(static_cast<std::uint32_t>(tf.rows));
  w.u32(static_cast<std::uint32_t>(tf.cols));
  w.f32(static_cast<float>(tf.frame_rate));
  for (double f : tf.freq_axis) w.f32(static_cast<float>(f));
  for (float v : tf.values) w.f32(v);
  return out;
}

TFMatrix decode_tfmatrix(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "tfmatrix");
  auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DataError("tfmatrix: bad magic (expected TFMX)");
  const auto version = r.u16();
  if (version != kVersion) throw DataError("tfmatrix: unsupported version " + std::to_string(version));
  const auto kind = r.u8();
  const auto scale = r.u8();
  if (kind > static_cast<std::uint8_t>(RepKind::Cqcc)) throw DataError("tfmatrix: unknown kind " + std::to_string(kind));
  if (scale > static_cast<std::uint8_t>(Scale::Normalized)) {
    throw DataError("tfmatrix: unknown scale " + std::to_string(scale));
  }
  TFMatrix tf;
  tf.kind = static_cast<RepKind>(kind);
  tf.scale = static_cast<Scale>(scale);
  tf.rows = r.u32();
  tf.cols = r.u32();
  tf.frame_rate = r.f32();
  if (r.remaining() != 4 * (tf.rows + tf.rows * tf.cols)) throw DataError("tfmatrix: payload size mismatch");
  tf.freq_axis.resize(tf.rows);
  for (auto& f : tf.freq_axis) f = r.f32();
  tf.values.resize(tf.rows * tf.cols);
  for (auto& v : tf.values) v = r.f32();
  tf.validate();
  return tf;
}

void write_tfmatrix(const TFMatrix& tf, const std::filesystem::path& path) {
  const auto bytes = encode_tfmatrix(tf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("tfmatrix: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("tfmatrix: short write to " + path.string());
}

TFMatrix read_tfmatrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("tfmatrix: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tfmatrix(bytes);
}

void write_tfmatrix_csv(const TFMatrix& tf, std::ostream& out) {
  out.precision(9);
  out << "freq_hz";
  for (std::size_t c = 0; c < tf.cols; ++c) out << ",t" << c;
  out << '\n';
  for (std::size_t r = 0; r < tf.rows; ++r) {
    out << tf.freq_axis[r];
    for (std::size_t c = 0; c < tf.cols; ++c) out << ',' << tf.at(r, c);
    out << '\n';
  }
}

TFMatrix magnitude_to_db(const TFMatrix& magnitude, double ref, double floor_db) {
  if (!(ref > 0.0)) throw DataError("magnitude_to_db: reference must be positive");
  TFMatrix out = magnitude;
  out.scale = Scale::Decibel;
  for (auto& v : out.values) {
    const double db = 20.0 * std::log10(std::max(static_cast<double>(v), kDbEpsilon) / ref);
    v = static_cast<float>(std::max(db, floor_db));
  }
  return out;
}

TFMatrix magnitude_to_db_maxref(const TFMatrix& magnitude, double floor_db) {
  double peak = 0.0;
  for (float v : magnitude.values) peak = std::max(peak, static_cast<double>(v));
  return magnitude_to_db(magnitude, std::max(peak, kDbEpsilon), floor_db);
}

TFMatrix minmax_normalize(const TFMatrix& tf) {
  TFMatrix out = tf;
  out.scale = Scale::Normalized;
  if (tf.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(tf.values.begin(), tf.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) {
    std::fill(out.values.begin(), out.values.end(), 0.5f);
    return out;
  }
  const double span = hi - lo;
  for (auto& v : out.values) v = static_cast<float>((static_cast<double>(v) - lo) / span);
  return out;
}

}  // namespace tfev::features
