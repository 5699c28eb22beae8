// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/features/filterbank.hpp"

#include <cmath>
#include <string>

#include "tfev/error.hpp"

namespace tfev::features {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

FilterBank::FilterBank(FilterScale scale, std::size_t n_filters, std::size_t n_fft, unsigned sample_rate)
    : scale_(scale), n_fft_(n_fft), sample_rate_(sample_rate) {
  if (n_filters < 2) throw DataError("filterbank: need at least 2 filters");
  if (n_fft < 2) throw DataError("filterbank: n_fft too small");
  if (n_filters > n_bins()) {
    throw DataError("filterbank: " + std::to_string(n_filters) + " filters exceed the " + std::to_string(n_bins()) +
                    " available FFT bins");
  }
  const double nyquist = sample_rate / 2.0;
  edges_.resize(n_filters + 2);
  if (scale == FilterScale::Mel) {
    const double top = hz_to_mel(nyquist);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      edges_[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(n_filters + 1));
    }
  } else {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      edges_[i] = nyquist * static_cast<double>(i) / static_cast<double>(n_filters + 1);
    }
  }
  edges_.front() = 0.0;
  edges_.back() = nyquist;
  centers_.assign(edges_.begin() + 1, edges_.end() - 1);

  weights_.resize(n_filters * n_bins());
  for (std::size_t i = 0; i < n_filters; ++i) {
    for (std::size_t m = 0; m < n_bins(); ++m) {
      const double hz = static_cast<double>(m) * sample_rate / static_cast<double>(n_fft);
      weights_[i * n_bins() + m] = response(i, hz);
    }
  }
}

double FilterBank::response(std::size_t i, double hz) const {
  const double lo = edges_[i];
  const double mid = edges_[i + 1];
  const double hi = edges_[i + 2];
  if (hz <= lo || hz >= hi) return 0.0;
  if (hz <= mid) return (hz - lo) / (mid - lo);
  return (hi - hz) / (hi - mid);
}

std::vector<double> FilterBank::apply(std::span<const double> power) const {
  if (power.size() != n_bins()) throw DataError("filterbank: power spectrum length mismatch");
  std::vector<double> out(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n_bins(); ++m) acc += weights_[i * n_bins() + m] * power[m];
    out[i] = acc;
  }
  return out;
}

std::vector<std::vector<double>> filterbank_energies(const signal::Waveform& wave, const StftParams& stft_params,
                                                     const FilterBank& bank) {
  const auto spec = signal::stft(wave, stft_params.window, stft_params.n_fft);
  std::vector<std::vector<double>> energies(bank.size(), std::vector<double>(spec.cols));
  std::vector<double> power(spec.rows);
  for (std::size_t f = 0; f < spec.cols; ++f) {
    for (std::size_t m = 0; m < spec.rows; ++m) power[m] = std::norm(spec.at(m, f));
    const auto e = bank.apply(power);
    for (std::size_t i = 0; i < bank.size(); ++i) energies[i][f] = e[i];
  }
  return energies;
}

TFMatrix mel_spectrogram(const signal::Waveform& wave, const StftParams& stft_params, std::size_t n_mels,
                         double floor_db) {
  const FilterBank bank(FilterScale::Mel, n_mels, stft_params.n_fft, wave.sample_rate());
  const auto energies = filterbank_energies(wave, stft_params, bank);
  const std::size_t frames = energies.front().size();
  auto tf = make_tfmatrix(RepKind::Mel, Scale::Magnitude, n_mels, frames, bank.centers_hz(),
                          static_cast<double>(wave.sample_rate()) / stft_params.window.hop);
  // Power -> amplitude so the 20*log10 dB rule yields 10*log10 of the energy.
  for (std::size_t i = 0; i < n_mels; ++i) {
    for (std::size_t f = 0; f < frames; ++f) tf.at(i, f) = static_cast<float>(std::sqrt(energies[i][f]));
  }
  auto db = magnitude_to_db_maxref(tf, floor_db);
  db.kind = RepKind::Mel;
  return db;
}

TFMatrix stft_db(const signal::Waveform& wave, const StftParams& stft_params, double floor_db) {
  const auto spec = signal::stft(wave, stft_params.window, stft_params.n_fft);
  auto tf = make_tfmatrix(RepKind::Stft, Scale::Magnitude, spec.rows, spec.cols, spec.bin_hz,
                          static_cast<double>(wave.sample_rate()) / stft_params.window.hop);
  for (std::size_t i = 0; i < spec.values.size(); ++i) tf.values[i] = static_cast<float>(std::abs(spec.values[i]));
  return magnitude_to_db_maxref(tf, floor_db);
}

}  // namespace tfev::features
