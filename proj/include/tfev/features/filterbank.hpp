// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "tfev/features/tfmatrix.hpp"
#include "tfev/signal/spectral.hpp"

namespace tfev::features {

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

enum class FilterScale { Mel, Linear };

/// Unit-peak triangular filters with shared edges. Edge points are equally
/// spaced on the chosen scale between 0 Hz and fs/2; each triangle is linear
/// in Hz between its edges, so neighbouring triangles sum to 1 between centers.
class FilterBank {
 public:
  /// Throws DataError when n_filters < 2 or exceeds the n_fft/2+1 available bins.
  FilterBank(FilterScale scale, std::size_t n_filters, std::size_t n_fft, unsigned sample_rate);

  std::size_t size() const { return centers_.size(); }
  std::size_t n_bins() const { return n_fft_ / 2 + 1; }
  FilterScale scale() const { return scale_; }
  const std::vector<double>& centers_hz() const { return centers_; }
  const std::vector<double>& edges_hz() const { return edges_; }

  /// Continuous response of filter i at frequency hz.
  double response(std::size_t i, double hz) const;
  /// Weight of filter i on FFT bin m.
  double weight(std::size_t i, std::size_t m) const { return weights_[i * n_bins() + m]; }

  /// Filter energies of a power spectrum of length n_bins().
  std::vector<double> apply(std::span<const double> power) const;

 private:
  FilterScale scale_;
  std::size_t n_fft_;
  unsigned sample_rate_;
  std::vector<double> edges_;    // n_filters + 2
  std::vector<double> centers_;  // n_filters
  std::vector<double> weights_;  // n_filters x n_bins
};

struct StftParams {
  signal::WindowSpec window{400, 160};
  std::size_t n_fft = 512;
};

/// Filterbank energies (n_filters x frames) over the STFT power spectrum.
std::vector<std::vector<double>> filterbank_energies(const signal::Waveform& wave, const StftParams& stft_params,
                                                     const FilterBank& bank);

/// Mel filterbank on the STFT power spectrum, converted to max-referenced dB.
TFMatrix mel_spectrogram(const signal::Waveform& wave, const StftParams& stft_params, std::size_t n_mels,
                         double floor_db = -80.0);

/// |STFT| in max-referenced dB.
TFMatrix stft_db(const signal::Waveform& wave, const StftParams& stft_params, double floor_db = -80.0);

}  // namespace tfev::features
