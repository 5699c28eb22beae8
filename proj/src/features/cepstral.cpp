// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/features/cepstral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tfev/error.hpp"

namespace tfev::features {

std::vector<double> dct2_orthonormal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<double> c(n);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(k) /
                             static_cast<double>(n));
    }
    c[k] = acc * (k == 0 ? scale0 : scale);
  }
  return c;
}

std::vector<double> idct2_orthonormal(std::span<const double> c) {
  const std::size_t n = c.size();
  if (n == 0) return {};
  std::vector<double> x(n);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c[0] * scale0;
    for (std::size_t k = 1; k < n; ++k) {
      acc += c[k] * scale *
             std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(k) /
                      static_cast<double>(n));
    }
    x[i] = acc;
  }
  return x;
}

namespace {

constexpr double kLogFloor = 1e-10;

TFMatrix coefficients_from_bands(const std::vector<std::vector<double>>& log_bands, RepKind kind,
                                 std::size_t n_coeffs, double frame_rate) {
  const std::size_t bands = log_bands.size();
  const std::size_t frames = log_bands.front().size();
  std::vector<double> axis(n_coeffs);
  for (std::size_t i = 0; i < n_coeffs; ++i) axis[i] = static_cast<double>(i);
  auto tf = make_tfmatrix(kind, Scale::Cepstrum, n_coeffs, frames, std::move(axis), frame_rate);
  std::vector<double> column(bands);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t b = 0; b < bands; ++b) column[b] = log_bands[b][f];
    const auto c = dct2_orthonormal(column);
    for (std::size_t i = 0; i < n_coeffs; ++i) tf.at(i, f) = static_cast<float>(c[i]);
  }
  return tf;
}

void check_coeff_count(std::size_t n_coeffs, std::size_t bands) {
  if (n_coeffs < 1) throw DataError("cepstral: n_coeffs must be >= 1");
  if (n_coeffs > bands) {
    throw DataError("cepstral: n_coeffs " + std::to_string(n_coeffs) + " exceeds the " + std::to_string(bands) +
                    " underlying bands");
  }
}

}  // namespace

TFMatrix cepstral(const signal::Waveform& wave, RepKind kind, const CepstralConfig& config) {
  switch (kind) {
    case RepKind::Mfcc:
    case RepKind::Lfcc: {
      check_coeff_count(config.n_coeffs, config.n_filters);
      const FilterBank bank(kind == RepKind::Mfcc ? FilterScale::Mel : FilterScale::Linear, config.n_filters,
                            config.stft.n_fft, wave.sample_rate());
      auto energies = filterbank_energies(wave, config.stft, bank);
      for (auto& band : energies) {
        for (double& e : band) e = std::log(std::max(e, kLogFloor));
      }
      return coefficients_from_bands(energies, kind, config.n_coeffs,
                                     static_cast<double>(wave.sample_rate()) / config.stft.window.hop);
    }
    case RepKind::Cqcc: {
      if (!config.cqt) throw DataError("cepstral: CQCC requires a CQT configuration");
      const auto& cq = *config.cqt;
      check_coeff_count(config.n_coeffs, static_cast<std::size_t>(cq.n_bins));
      const auto spec = cqt_complex(wave, cq);
      std::vector<std::vector<double>> bands(spec.rows, std::vector<double>(spec.cols));
      std::vector<double> column(spec.rows);
      for (std::size_t f = 0; f < spec.cols; ++f) {
        for (std::size_t k = 0; k < spec.rows; ++k) column[k] = std::log(std::max(std::norm(spec.at(k, f)), kLogFloor));
        const auto uniform = uniform_resample_log_axis(column, cq);
        for (std::size_t k = 0; k < spec.rows; ++k) bands[k][f] = uniform[k];
      }
      return coefficients_from_bands(bands, kind, config.n_coeffs, static_cast<double>(cq.sample_rate) / cq.hop);
    }
    default:
      throw DataError("cepstral: kind '" + std::string(to_string(kind)) + "' is not a cepstral representation");
  }
}

}  // namespace tfev::features
