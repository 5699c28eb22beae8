// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/signal/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tfev/error.hpp"

namespace tfev::signal {

void WindowSpec::validate() const {
  if (length == 0) throw DataError("window: length must be positive");
  if (hop == 0 || hop > length) {
    throw DataError("window: hop must satisfy 0 < hop <= length (hop " + std::to_string(hop) + ", length " +
                    std::to_string(length) + ")");
  }
}

std::vector<double> hann_window(std::size_t length) {
  if (length == 0) throw DataError("hann_window: length must be >= 1");
  std::vector<double> w(length);
  const double n = static_cast<double>(length);
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n));
  }
  return w;
}

std::vector<Complex> dft_naive(std::span<const Complex> frame) {
  if (frame.empty()) throw DataError("dft: empty frame");
  const std::size_t n = frame.size();
  std::vector<Complex> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      // Reduce m*k mod n first so the angle stays small and exact.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((m * k) % n) / static_cast<double>(n);
      acc += frame[k] * Complex(std::cos(angle), std::sin(angle));
    }
    out[m] = acc;
  }
  return out;
}

std::vector<Complex> dft_naive(std::span<const double> frame) {
  std::vector<Complex> c(frame.begin(), frame.end());
  return dft_naive(std::span<const Complex>(c));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<Complex> fft(std::span<const Complex> frame) {
  const std::size_t n = frame.size();
  if (!is_power_of_two(n)) {
    throw DataError("fft: length " + std::to_string(n) + " is not a power of two");
  }
  std::vector<Complex> a(frame.begin(), frame.end());
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles evaluated directly per index rather than by recurrence to keep
    // rounding error flat across stages.
    std::vector<Complex> tw(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      tw[k] = Complex(std::cos(angle), std::sin(angle));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  return a;
}

std::vector<Complex> fft(std::span<const double> frame) {
  std::vector<Complex> c(frame.begin(), frame.end());
  return fft(std::span<const Complex>(c));
}

std::size_t stft_frame_count(std::size_t signal_length, const WindowSpec& window) {
  if (signal_length < window.length) return 0;
  return 1 + (signal_length - window.length) / window.hop;
}

ComplexMatrix stft(const Waveform& wave, const WindowSpec& window, std::size_t n_fft) {
  window.validate();
  if (n_fft < window.length) {
    throw DataError("stft: n_fft (" + std::to_string(n_fft) + ") must be >= window length (" +
                    std::to_string(window.length) + ")");
  }
  if (!is_power_of_two(n_fft)) throw DataError("stft: n_fft " + std::to_string(n_fft) + " is not a power of two");
  const auto x = wave.samples();
  if (x.size() < window.length) {
    throw DataError("stft: waveform of " + std::to_string(x.size()) + " samples is shorter than one window (" +
                    std::to_string(window.length) + ")");
  }
  const std::size_t frames = stft_frame_count(x.size(), window);
  const std::size_t bins = n_fft / 2 + 1;
  const auto w = hann_window(window.length);

  ComplexMatrix out;
  out.rows = bins;
  out.cols = frames;
  out.values.resize(bins * frames);
  out.bin_hz.resize(bins);
  out.frame_times.resize(frames);
  const double fs = wave.sample_rate();
  for (std::size_t m = 0; m < bins; ++m) out.bin_hz[m] = static_cast<double>(m) * fs / static_cast<double>(n_fft);

  std::vector<Complex> buf(n_fft);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * window.hop;
    std::fill(buf.begin(), buf.end(), Complex{});
    for (std::size_t i = 0; i < window.length; ++i) buf[i] = x[start + i] * w[i];
    const auto spec = fft(std::span<const Complex>(buf));
    for (std::size_t m = 0; m < bins; ++m) out.at(m, f) = spec[m];
    out.frame_times[f] = static_cast<double>(start) / fs;
  }
  return out;
}

}  // namespace tfev::signal
