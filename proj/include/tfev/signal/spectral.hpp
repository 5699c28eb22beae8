// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tfev/signal/waveform.hpp"

namespace tfev::signal {

using Complex = std::complex<double>;

/// Rows are frequency bins, columns are frames. Storage is row-major.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> values;
  std::vector<double> bin_hz;       // length == rows
  std::vector<double> frame_times;  // seconds, length == cols

  Complex& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct WindowSpec {
  std::size_t length = 400;
  std::size_t hop = 160;

  void validate() const;
};

/// Periodic Hann window: w[n] = 0.5 (1 - cos(2 pi n / length)).
std::vector<double> hann_window(std::size_t length);

/// Direct O(N^2) DFT. Reference implementation; accepts any length.
std::vector<Complex> dft_naive(std::span<const double> frame);
std::vector<Complex> dft_naive(std::span<const Complex> frame);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Iterative radix-2 FFT. Length must be a power of two.
std::vector<Complex> fft(std::span<const double> frame);
std::vector<Complex> fft(std::span<const Complex> frame);

/// Frames are taken without centering: frame f covers [f*hop, f*hop + length).
/// Each frame is Hann-windowed, zero-padded to n_fft, and only bins 0..n_fft/2 are kept.
ComplexMatrix stft(const Waveform& wave, const WindowSpec& window, std::size_t n_fft);

std::size_t stft_frame_count(std::size_t signal_length, const WindowSpec& window);

}  // namespace tfev::signal
