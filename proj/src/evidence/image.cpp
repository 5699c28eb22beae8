// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/evidence/image.hpp"

#include <zlib.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "tfev/error.hpp"

namespace tfev::evidence {

void EvidenceImage::validate() const {
  if (width == 0 || height == 0) throw DataError("image: zero dimension");
  if (pixels.size() != width * height * 3) throw DataError("image: pixel buffer is not width*height*3 bytes");
}

std::uint8_t colormap_index(float value) {
  const double scaled = std::floor(static_cast<double>(value) * 256.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

EvidenceImage render_pseudocolor(const features::TFMatrix& normalized, std::size_t out_width,
                                 std::size_t out_height, Colormap colormap) {
  if (normalized.empty()) throw DataError("render: empty matrix");
  if (out_width == 0 || out_height == 0) throw DataError("render: output size must be positive");
  for (float v : normalized.values) {
    if (!(v >= 0.0f && v <= 1.0f)) throw DataError("render: values must be normalized to [0, 1]");
  }
  const auto& table = colormap_table(colormap);
  EvidenceImage img;
  img.width = out_width;
  img.height = out_height;
  img.pixels.resize(out_width * out_height * 3);
  for (std::size_t y = 0; y < out_height; ++y) {
    // Image row 0 is the top, i.e. the highest frequency bin.
    const std::size_t flipped = out_height - 1 - y;
    const std::size_t row = flipped * normalized.rows / out_height;
    for (std::size_t x = 0; x < out_width; ++x) {
      const std::size_t col = x * normalized.cols / out_width;
      const Rgb c = table[colormap_index(normalized.at(row, col))];
      auto* p = &img.pixels[(y * out_width + x) * 3];
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
    }
  }
  return img;
}

EvidenceImage render_evidence(const features::TFMatrix& tf, const RenderConfig& config) {
  return render_pseudocolor(features::minmax_normalize(tf), config.width, config.height, config.colormap);
}

ImageFormat parse_image_format(std::string_view token) {
  if (token == "ppm") return ImageFormat::Ppm;
  if (token == "png") return ImageFormat::Png;
  throw UsageError("unsupported image format '" + std::string(token) + "' (expected ppm or png)");
}

std::vector<std::uint8_t> encode_ppm(const EvidenceImage& image) {
  image.validate();
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

namespace {

class PpmScanner {
 public:
  explicit PpmScanner(std::span<const std::uint8_t> b) : b_(b) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* field) {
    skip_space_and_comments();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw DataError(std::string("ppm: missing ") + field);
    return v;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> b_;
};

}  // namespace

EvidenceImage decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw DataError("ppm: not a P6 file");
  PpmScanner s(bytes);
  s.pos_ = 2;
  EvidenceImage img;
  img.width = s.number("width");
  img.height = s.number("height");
  const auto maxval = s.number("maxval");
  if (maxval != 255) throw DataError("ppm: unsupported maxval " + std::to_string(maxval));
  if (s.pos_ >= bytes.size() || !std::isspace(bytes[s.pos_])) throw DataError("ppm: malformed header");
  ++s.pos_;
  const std::size_t n = img.width * img.height * 3;
  if (bytes.size() - s.pos_ != n) throw DataError("ppm: payload size does not match header");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(s.pos_), bytes.end());
  img.validate();
  return img;
}

std::vector<std::uint8_t> encode_png(const EvidenceImage& image) {
  image.validate();
  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  auto put_u32 = [](std::vector<std::uint8_t>& v, std::uint32_t x) {
    for (int i = 3; i >= 0; --i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  };
  auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
  };

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  chunk("IHDR", ihdr);

  std::vector<std::uint8_t> raw;
  raw.reserve(image.height * (1 + image.width * 3));
  for (std::size_t y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const auto* row = &image.pixels[y * image.width * 3];
    raw.insert(raw.end(), row, row + image.width * 3);
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_len);
  if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw DataError("png: zlib compression failed");
  }
  packed.resize(packed_len);
  chunk("IDAT", packed);
  chunk("IEND", {});
  return out;
}

void encode_image_file(const EvidenceImage& image, const std::filesystem::path& path, ImageFormat format) {
  const auto bytes = format == ImageFormat::Ppm ? encode_ppm(image) : encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("image: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("image: short write to " + path.string());
}

EvidenceImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("ppm: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ppm(bytes);
}

}  // namespace tfev::evidence
