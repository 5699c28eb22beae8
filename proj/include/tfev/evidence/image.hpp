// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "tfev/evidence/colormap.hpp"
#include "tfev/features/tfmatrix.hpp"

namespace tfev::evidence {

/// RGB8, row-major, row 0 at the top.
struct EvidenceImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  Rgb pixel(std::size_t x, std::size_t y) const {
    const auto* p = &pixels[(y * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void validate() const;
  friend bool operator==(const EvidenceImage&, const EvidenceImage&) = default;
};

struct RenderConfig {
  std::size_t width = 224;
  std::size_t height = 224;
  Colormap colormap = Colormap::Viridis;
};

/// Colormap index for a normalized value: min(255, floor(v * 256)).
std::uint8_t colormap_index(float value);

/// Low frequencies at the bottom, time left to right, nearest-neighbour resize.
/// Throws DataError for an empty matrix or values outside [0, 1].
EvidenceImage render_pseudocolor(const features::TFMatrix& normalized, std::size_t out_width, std::size_t out_height,
                                 Colormap colormap = Colormap::Viridis);

/// render_pseudocolor(minmax_normalize(tf)) with the config's size and colormap.
EvidenceImage render_evidence(const features::TFMatrix& tf, const RenderConfig& config);

enum class ImageFormat { Ppm, Png };
/// "ppm" or "png"; anything else throws UsageError.
ImageFormat parse_image_format(std::string_view token);

std::vector<std::uint8_t> encode_ppm(const EvidenceImage& image);
EvidenceImage decode_ppm(std::span<const std::uint8_t> bytes);
/// Minimal truecolor PNG (zlib-compressed, no filtering).
std::vector<std::uint8_t> encode_png(const EvidenceImage& image);

void encode_image_file(const EvidenceImage& image, const std::filesystem::path& path, ImageFormat format);
/// Reads a P6 PPM file.
EvidenceImage read_ppm(const std::filesystem::path& path);

}  // namespace tfev::evidence
