// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/oracles.hpp"
#include "tfev/error.hpp"
#include "tfev/signal/spectral.hpp"
#include "tfev/signal/wav.hpp"

using namespace tfev;
using namespace tfev::signal;
using Catch::Approx;

namespace {

std::vector<std::uint8_t> pcm16_file(const std::vector<std::int16_t>& codes, std::uint16_t channels,
                                     const char* magic = "RIFF", std::uint16_t format = 1, std::uint16_t bits = 16) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  b.insert(b.end(), magic, magic + 4);
  u32(36 + 2 * static_cast<std::uint32_t>(codes.size()));
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  u32(16);
  u16(format);
  u16(channels);
  u32(16000);
  u32(16000 * 2 * channels);
  u16(static_cast<std::uint16_t>(2 * channels));
  u16(bits);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  u32(2 * static_cast<std::uint32_t>(codes.size()));
  for (auto c : codes) u16(static_cast<std::uint16_t>(c));
  return b;
}

double max_rel_spectrum_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    err = std::max(err, std::abs(a[i] - b[i]));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("load_wav scales PCM16 by 1/32768", "[wav]") {
  const auto w = decode_wav(pcm16_file({32767, 0, -32768, 0}, 1));
  REQUIRE(w.size() == 4);
  CHECK(w.sample_rate() == 16000);
  CHECK(w.samples()[0] == Approx(0.99997).epsilon(1e-5));
  CHECK(w.samples()[1] == 0.0);
  CHECK(w.samples()[2] == -1.0);
  CHECK(w.samples()[3] == 0.0);
}

TEST_CASE("load_wav downmixes stereo by channel mean", "[wav]") {
  const auto w = decode_wav(pcm16_file({16384, 0, -16384, -16384}, 2));
  REQUIRE(w.size() == 2);
  CHECK(w.samples()[0] == 0.25);
  CHECK(w.samples()[1] == -0.5);
}

TEST_CASE("load_wav rejects unsupported containers and codecs", "[wav]") {
  CHECK_THROWS_WITH(decode_wav(pcm16_file({1, 2}, 1, "RIFX")), Catch::Matchers::ContainsSubstring("unsupported container"));
  CHECK_THROWS_WITH(decode_wav(pcm16_file({1, 2}, 1, "RIFF", 3)), Catch::Matchers::ContainsSubstring("format tag"));
  CHECK_THROWS_WITH(decode_wav(pcm16_file({1, 2}, 1, "RIFF", 1, 24)),
                    Catch::Matchers::ContainsSubstring("bits_per_sample"));
  CHECK_THROWS_AS(decode_wav(std::vector<std::uint8_t>{'R', 'I'}), DataError);
}

TEST_CASE("wav round trip stays within one quantization step", "[wav]") {
  auto samples = oracle::random_vector(4000, 7);
  samples[0] = 1.0;
  samples[1] = -1.0;
  const Waveform w(samples, 22050);
  const auto path = std::filesystem::temp_directory_path() / "tfev_test_roundtrip.wav";
  write_wav(w, path);
  const auto back = load_wav(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == w.size());
  CHECK(back.sample_rate() == 22050);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(back.samples()[i] - samples[i]));
  CHECK(worst <= 1.0 / 32768.0);
}

TEST_CASE("waveform invariants", "[waveform]") {
  CHECK_THROWS_AS(Waveform({}, 16000), DataError);
  CHECK_THROWS_AS(Waveform({0.0}, 0), DataError);
  CHECK_THROWS_AS(Waveform({0.0, std::nan("")}, 16000), DataError);
}

TEST_CASE("linear resampler hits the target length and interpolates", "[waveform]") {
  std::vector<double> ramp(32000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i) / 32000.0;
  const auto out = resample_linear(Waveform(ramp, 32000), 16000);
  CHECK(out.sample_rate() == 16000);
  CHECK(out.size() == 16000);
  CHECK(out.samples()[100] == Approx(200.0 / 32000.0).margin(1e-12));
}

TEST_CASE("hann_window closed form", "[window]") {
  CHECK(hann_window(1) == std::vector<double>{0.0});
  const auto w4 = hann_window(4);
  CHECK(w4[0] == Approx(0.0).margin(1e-15));
  CHECK(w4[1] == Approx(0.5));
  CHECK(w4[2] == Approx(1.0));
  CHECK(w4[3] == Approx(0.5));
  CHECK_THROWS_AS(hann_window(0), DataError);
}

TEST_CASE("hann_window is periodic-symmetric for every length up to 64", "[window]") {
  for (std::size_t len = 1; len <= 64; ++len) {
    const auto w = hann_window(len);
    for (std::size_t n = 1; n < len; ++n) {
      CHECK(w[n] == Approx(w[len - n]).margin(1e-15));
      CHECK(w[n] >= 0.0);
      CHECK(w[n] <= 1.0);
    }
  }
}

TEST_CASE("dft_naive fixtures", "[dft]") {
  const auto imp = dft_naive(std::vector<double>{1, 0, 0, 0});
  for (const auto& c : imp) {
    CHECK(c.real() == 1.0);
    CHECK(c.imag() == 0.0);
  }
  const auto dc = dft_naive(std::vector<double>{1, 1, 1, 1});
  CHECK(dc[0].real() == Approx(4.0));
  for (std::size_t m = 1; m < 4; ++m) CHECK(std::abs(dc[m]) < 1e-12);
}

TEST_CASE("Parseval holds for dft_naive on random frames", "[dft]") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto x = oracle::random_vector(37 + seed * 11, seed);
    const auto X = dft_naive(x);
    double time_energy = 0.0, freq_energy = 0.0;
    for (double v : x) time_energy += v * v;
    for (const auto& c : X) freq_energy += std::norm(c);
    freq_energy /= static_cast<double>(x.size());
    CHECK(oracle::rel_err(time_energy, freq_energy) < 1e-10);
  }
}

TEST_CASE("fft matches dft_naive and rejects non-power-of-two lengths", "[fft]") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto x = oracle::random_vector(16, 100 + seed);
    CHECK(max_rel_spectrum_error(fft(x), dft_naive(x)) < 1e-10);
  }
  const auto imp = fft(std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0});
  for (const auto& c : imp) CHECK(std::abs(c - Complex(1.0, 0.0)) < 1e-15);
  CHECK_THROWS_AS(fft(std::vector<double>(12, 0.0)), DataError);
  CHECK_THROWS_AS(fft(std::vector<double>{}), DataError);
}

TEST_CASE("fft is linear", "[fft]") {
  const auto x = oracle::random_vector(64, 3);
  std::vector<double> ax(x);
  for (auto& v : ax) v *= 2.5;
  const auto X = fft(x);
  const auto AX = fft(ax);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(std::abs(AX[i] - 2.5 * X[i]) < 1e-12 * (1.0 + std::abs(AX[i])));
}

TEST_CASE("fft agrees with dft_naive and Parseval on every power of two up to 1024", "[fft]") {
  for (std::size_t n = 1; n <= 1024; n <<= 1) {
    const auto x = oracle::random_vector(n, static_cast<unsigned>(n));
    const auto X = fft(x);
    CHECK(max_rel_spectrum_error(X, dft_naive(x)) < 1e-9);
    double te = 0.0, fe = 0.0;
    for (double v : x) te += v * v;
    for (const auto& c : X) fe += std::norm(c);
    CHECK(oracle::rel_err(te, fe / static_cast<double>(n)) < 1e-9);
  }
}

TEST_CASE("stft frame count and axes", "[stft]") {
  const Waveform w(oracle::random_vector(16000, 1), 16000);
  const auto s = stft(w, {400, 160}, 512);
  CHECK(s.cols == 98);
  CHECK(s.rows == 257);
  CHECK(s.bin_hz[1] == Approx(31.25));
  CHECK(s.frame_times[1] == Approx(0.01));
  CHECK_THROWS_AS(stft(Waveform(std::vector<double>(399, 0.1), 16000), {400, 160}, 512), DataError);
  CHECK_THROWS_AS(stft(w, {400, 160}, 256), DataError);
  CHECK_THROWS_AS(stft(w, {400, 0}, 512), DataError);
  CHECK_THROWS_AS(stft(w, {400, 401}, 512), DataError);
}

TEST_CASE("stft of a constant signal concentrates in bin 0", "[stft]") {
  const Waveform w(std::vector<double>(2000, 0.5), 16000);
  const auto s = stft(w, {256, 128}, 256);
  for (std::size_t f = 0; f < s.cols; ++f) {
    const double dc = std::abs(s.at(0, f));
    for (std::size_t m = 2; m < s.rows; ++m) CHECK(std::abs(s.at(m, f)) < 1e-9 * dc);
  }
}

TEST_CASE("stft is linear and deterministic", "[stft]") {
  const auto x = oracle::random_vector(3000, 9);
  const Waveform w(x, 16000);
  const auto s1 = stft(w, {400, 160}, 512);
  const auto s2 = stft(w.scaled(2.0), {400, 160}, 512);
  const auto again = stft(w, {400, 160}, 512);
  for (std::size_t i = 0; i < s1.values.size(); ++i) {
    CHECK(s2.values[i] == 2.0 * s1.values[i]);
    CHECK(again.values[i] == s1.values[i]);
  }
}

TEST_CASE("stft of a time-reversed signal reverses frame order when hop == window", "[stft]") {
  // With hop == window the frames tile the signal; reversing time reverses the
  // frame sequence, and each frame's magnitude spectrum matches the reversed
  // frame's spectrum up to the window asymmetry, so compare frame energies.
  const auto x = oracle::random_vector(256 * 8, 21);
  std::vector<double> rev(x.rbegin(), x.rend());
  const auto a = stft(Waveform(x, 16000), {256, 256}, 256);
  const auto b = stft(Waveform(rev, 16000), {256, 256}, 256);
  REQUIRE(a.cols == 8);
  REQUIRE(b.cols == 8);
  const auto w = hann_window(256);
  for (std::size_t f = 0; f < a.cols; ++f) {
    // Reference: reverse frame f of x, window it, transform.
    std::vector<double> frame(256);
    const std::size_t src = (a.cols - 1 - f) * 256;
    for (std::size_t i = 0; i < 256; ++i) frame[i] = x[src + 255 - i] * w[i];
    const auto ref = fft(frame);
    for (std::size_t m = 0; m < b.rows; ++m) CHECK(std::abs(b.at(m, f) - ref[m]) < 1e-9);
  }
}
