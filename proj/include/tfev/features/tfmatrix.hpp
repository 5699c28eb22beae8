// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tfev::features {

enum class RepKind : std::uint8_t { Cqt = 0, Mel = 1, Stft = 2, Lfcc = 3, Mfcc = 4, Cqcc = 5 };

enum class Scale : std::uint8_t { Magnitude = 0, Decibel = 1, Cepstrum = 2, Normalized = 3 };

std::string_view to_string(RepKind kind);
std::string_view to_string(Scale scale);
/// Accepts the lowercase CLI spelling ("cqt", "mel", ...). Throws UsageError otherwise.
RepKind parse_rep_kind(std::string_view name);

/// Real bins x frames matrix. Values are stored as 32-bit floats (the
/// serialized precision), so a matrix survives a blob round trip unchanged.
struct TFMatrix {
  RepKind kind = RepKind::Cqt;
  Scale scale = Scale::Magnitude;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;    // row-major, rows * cols
  std::vector<double> freq_axis;  // Hz per row (coefficient index for cepstra)
  double frame_rate = 0.0;        // frames per second

  float& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool empty() const { return rows == 0 || cols == 0; }

  /// Shape, axis length, and finiteness checks. Throws DataError.
  void validate() const;
};

TFMatrix make_tfmatrix(RepKind kind, Scale scale, std::size_t rows, std::size_t cols, std::vector<double> freq_axis,
                       double frame_rate);

// Binary layout, little-endian:
//   "TFMX" | u16 version=1 | u8 kind | u8 scale | u32 rows | u32 cols | f32 frame_rate
//   | rows x f32 freq_axis | rows*cols x f32 values (row-major)
std::vector<std::uint8_t> encode_tfmatrix(const TFMatrix& tf);
TFMatrix decode_tfmatrix(std::span<const std::uint8_t> bytes);
void write_tfmatrix(const TFMatrix& tf, const std::filesystem::path& path);
TFMatrix read_tfmatrix(const std::filesystem::path& path);

/// CSV for inspection: header row "freq_hz,t0,t1,...", then one row per bin.
void write_tfmatrix_csv(const TFMatrix& tf, std::ostream& out);

/// 20*log10(max(m, eps)/ref), clamped below at floor_db. Throws DataError when ref <= 0.
TFMatrix magnitude_to_db(const TFMatrix& magnitude, double ref, double floor_db = -80.0);
/// Same, with ref = max(matrix maximum, eps).
TFMatrix magnitude_to_db_maxref(const TFMatrix& magnitude, double floor_db = -80.0);
inline constexpr double kDbEpsilon = 1e-10;

/// (v - min) / (max - min); a constant matrix maps to 0.5 everywhere.
TFMatrix minmax_normalize(const TFMatrix& tf);

}  // namespace tfev::features
