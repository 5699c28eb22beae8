// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "tfev/features/tfmatrix.hpp"
#include "tfev/signal/spectral.hpp"
#include "tfev/signal/waveform.hpp"

namespace tfev::features {

/// Constant-Q analysis parameters.
///
/// Bin k has center frequency f_k = f_min * 2^(k / bins_per_octave) and a
/// periodic Hann window of N_k = ceil(Q * fs / f_k) samples, where
/// Q = 1 / (2^(1/B) - 1). Frame tau is centered on input sample tau * hop.
struct CqtConfig {
  double f_min = 32.7;
  int bins_per_octave = 24;
  int n_bins = 168;
  std::size_t hop = 160;
  unsigned sample_rate = 16000;

  double q() const;
  double center_frequency(int k) const;
  std::vector<double> center_frequencies() const;
  std::size_t window_length(int k) const;
  /// N_0, the window of the lowest bin.
  std::size_t longest_window() const { return window_length(0); }
  /// Reflect padding added to each edge: floor(N_0 / 2).
  std::size_t edge_padding() const { return longest_window() / 2; }
  std::size_t frame_count(std::size_t signal_length) const { return 1 + signal_length / hop; }

  /// Throws DataError if any field is out of range or f_{K-1} >= fs/2.
  void validate() const;
};

/// Signal extended by reflecting floor(N_0/2) samples at each edge (edge sample not repeated).
/// Index i of the result corresponds to input sample i - edge_padding().
std::vector<double> reflect_pad(std::span<const double> x, std::size_t pad);

/// Complex CQT coefficients, rows = bins (low to high), cols = frames.
///
/// Phase is referenced to absolute sample index n (as in e^{-j 2 pi f_k n / fs}),
/// so the values are comparable with a direct evaluation of the sum.
/// Throws DataError when the waveform is not longer than N_0 or the sample
/// rate differs from the config.
signal::ComplexMatrix cqt_complex(const signal::Waveform& wave, const CqtConfig& config);

/// |X_CQT(f_k, tau)| as a TFMatrix of kind Cqt, scale Magnitude.
TFMatrix cqt(const signal::Waveform& wave, const CqtConfig& config);

/// Log-power CQT resampled onto a uniform frequency grid (same bin count),
/// by linear interpolation in log-frequency. Input row order low to high.
std::vector<double> uniform_resample_log_axis(std::span<const double> log_power, const CqtConfig& config);

}  // namespace tfev::features
