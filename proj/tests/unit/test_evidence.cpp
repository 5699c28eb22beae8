// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "tfev/digest.hpp"
#include "tfev/error.hpp"
#include "tfev/evidence/image.hpp"
#include "tfev/evidence/manifest.hpp"
#include "tfev/evidence/sample.hpp"
#include "tfev/features/cqt.hpp"
#include "tfev/signal/wav.hpp"

using namespace tfev;
using namespace tfev::evidence;
using features::RepKind;
using features::Scale;

namespace {

features::TFMatrix normalized(std::size_t rows, std::size_t cols, std::vector<float> v) {
  auto tf = features::make_tfmatrix(RepKind::Cqt, Scale::Normalized, rows, cols, std::vector<double>(rows, 1.0), 1.0);
  tf.values = std::move(v);
  return tf;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tfev_test_evidence";
  std::filesystem::create_directories(dir);
  return dir / name;
}

features::FeatureConfig small_features() {
  features::FeatureConfig f;
  f.cqt.f_min = 110.0;
  f.cqt.bins_per_octave = 12;
  f.cqt.n_bins = 48;
  return f;
}

}  // namespace

TEST_CASE("colormap endpoints", "[render]") {
  CHECK(colormap_index(0.0f) == 0);
  CHECK(colormap_index(1.0f) == 255);
  const auto img = render_pseudocolor(normalized(1, 2, {0.0f, 1.0f}), 2, 1);
  const auto& lut = colormap_table(Colormap::Viridis);
  CHECK(img.pixel(0, 0) == lut[0]);
  CHECK(img.pixel(1, 0) == lut[255]);
}

TEST_CASE("nearest-neighbour upscale duplicates pixels into blocks", "[render]") {
  // Row 0 is the lowest frequency and lands on the bottom of the image.
  const auto tf = normalized(2, 2, {0.0f, 0.25f, 0.5f, 1.0f});
  const auto img = render_pseudocolor(tf, 4, 4, Colormap::Gray);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      const std::size_t row = y < 2 ? 1 : 0;
      const std::size_t col = x / 2;
      CHECK(img.pixel(x, y) == colormap_table(Colormap::Gray)[colormap_index(tf.at(row, col))]);
    }
  }
}

TEST_CASE("render of a fixed 4x4 matrix matches the pinned digest", "[render][golden]") {
  std::vector<float> v(16);
  for (std::size_t i = 0; i < 16; ++i) v[i] = static_cast<float>(i) / 15.0f;
  const auto img = render_pseudocolor(normalized(4, 4, v), 4, 4);
  CHECK(sha256_hex(encode_ppm(img)) == "2a0471a1833b85efccb1b7ee60adfd8d7ba3b81a3bb44752a97e153fdf940b6b");
}

TEST_CASE("rendering preserves value order", "[render][property]") {
  const auto r = oracle::random_vector(256, 8, 0.0, 1.0);
  std::vector<float> v(r.begin(), r.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[i] < v[j]) CHECK(colormap_index(v[i]) <= colormap_index(v[j]));
    }
  }
}

TEST_CASE("render rejects empty and out-of-range input", "[render]") {
  CHECK_THROWS_AS(render_pseudocolor(normalized(0, 0, {}), 4, 4), DataError);
  CHECK_THROWS_AS(render_pseudocolor(normalized(1, 1, {1.5f}), 4, 4), DataError);
  CHECK_THROWS_AS(render_pseudocolor(normalized(1, 1, {0.5f}), 0, 4), DataError);
}

TEST_CASE("1x1 red PPM is the bare P6 header followed by one RGB triple", "[ppm]") {
  EvidenceImage img{1, 1, {255, 0, 0}};
  const auto bytes = encode_ppm(img);
  const std::string expected = std::string("P6\n1 1\n255\n") + std::string("\xff\x00\x00", 3);
  CHECK(std::string(bytes.begin(), bytes.end()) == expected);
  CHECK(bytes.size() == 14);
}

TEST_CASE("PPM encode/decode round trip on random images", "[ppm]") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    EvidenceImage img;
    img.width = 1 + gen() % 40;
    img.height = 1 + gen() % 40;
    img.pixels.resize(img.width * img.height * 3);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen());
    CHECK(decode_ppm(encode_ppm(img)) == img);
  }
  const auto path = scratch("rt.ppm");
  EvidenceImage img{3, 2, std::vector<std::uint8_t>(18, 7)};
  encode_image_file(img, path, ImageFormat::Ppm);
  CHECK(read_ppm(path) == img);
}

TEST_CASE("image format tokens", "[ppm]") {
  CHECK(parse_image_format("ppm") == ImageFormat::Ppm);
  CHECK(parse_image_format("png") == ImageFormat::Png);
  CHECK_THROWS_AS(parse_image_format("bmp"), UsageError);
  const EvidenceImage img{2, 2, std::vector<std::uint8_t>(12, 9)};
  const auto png = encode_png(img);
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK_THROWS_AS(encode_image_file(img, "/nonexistent_dir_tfev/x.ppm", ImageFormat::Ppm), IoError);
}

TEST_CASE("manifest reads one line and ignores unknown keys", "[manifest]") {
  std::istringstream in(
      R"({"audio_path":"a.wav","image_path":"a.ppm","label":"fake","split":"dev","domain":"A","extra":1})"
      "\n");
  const auto m = read_manifest(in);
  REQUIRE(m.size() == 1);
  CHECK(m[0].label == Label::Fake);
  CHECK(m[0].split == Split::Dev);
  CHECK(m[0].domain == "A");
}

TEST_CASE("manifest errors carry line numbers", "[manifest]") {
  std::istringstream bad_label(
      R"({"audio_path":"a","image_path":"b","label":"real","split":"train","domain":""})"
      "\n"
      R"({"audio_path":"a","image_path":"b","label":"bonafide","split":"train","domain":""})");
  CHECK_THROWS_WITH(read_manifest(bad_label), Catch::Matchers::ContainsSubstring("invalid label") &&
                                                  Catch::Matchers::ContainsSubstring("line 2"));
  std::istringstream missing(R"({"audio_path":"a","label":"real","split":"train","domain":""})");
  CHECK_THROWS_WITH(read_manifest(missing), Catch::Matchers::ContainsSubstring("image_path") &&
                                                Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("manifest write-then-read is identity on 100 random samples", "[manifest]") {
  std::mt19937 gen(42);
  Manifest m;
  for (int i = 0; i < 100; ++i) {
    Sample s;
    s.audio_path = "audio/utt_" + std::to_string(gen() % 100000) + ".wav";
    s.image_path = "img/\"quoted\" " + std::to_string(i) + ".ppm";
    s.label = gen() % 2 ? Label::Fake : Label::Real;
    s.split = static_cast<Split>(gen() % 3);
    s.domain = gen() % 2 ? "A" : "domain\tB";
    m.push_back(s);
  }
  std::stringstream io;
  write_manifest(m, io);
  CHECK(read_manifest(io) == m);
  CHECK(filter_split(m, Split::Dev).size() ==
        static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](const Sample& s) { return s.split == Split::Dev; })));
}

TEST_CASE("build_sample is deterministic and the image is a recomputation of the stored audio", "[sample]") {
  const signal::Waveform w(oracle::random_vector(8000, 12, -0.5, 0.5), 16000);
  const RenderConfig render{64, 48, Colormap::Viridis};
  const auto feats = small_features();
  const auto wav = scratch("s.wav");
  std::filesystem::remove(wav);
  const auto s1 = build_sample(w, Label::Fake, {wav, scratch("s1.ppm")}, feats, render, Split::Train, "A");
  const auto s2 = build_sample(w, Label::Fake, {wav, scratch("s2.ppm")}, feats, render, Split::Train, "A");
  CHECK(sha256_file(s1.image_path) == sha256_file(s2.image_path));

  const auto stored = signal::load_wav(wav);
  const auto tf = features::minmax_normalize(features::magnitude_to_db_maxref(features::cqt(stored, feats.cqt)));
  const auto again = render_pseudocolor(tf, render.width, render.height, render.colormap);
  CHECK(read_ppm(s1.image_path) == again);

  std::stringstream io;
  write_manifest({s1}, io);
  CHECK(read_manifest(io).at(0).label == Label::Fake);
}
