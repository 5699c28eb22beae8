// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace tfev::oracle {

signal::ComplexMatrix cqt_direct(const signal::Waveform& wave, const features::CqtConfig& config) {
  const auto x = wave.samples();
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const double fs = config.sample_rate;
  const double q = 1.0 / (std::pow(2.0, 1.0 / config.bins_per_octave) - 1.0);
  const auto n0 = static_cast<std::ptrdiff_t>(std::ceil(q * fs / config.f_min));
  const std::ptrdiff_t pad = n0 / 2;
  auto sample = [&](std::ptrdiff_t n) -> double {
    if (n >= 0 && n < len) return x[static_cast<std::size_t>(n)];
    if (n < 0 && n >= -pad) return x[static_cast<std::size_t>(-n)];
    if (n >= len && n < len + pad) return x[static_cast<std::size_t>(2 * (len - 1) - n)];
    return 0.0;
  };

  signal::ComplexMatrix out;
  out.rows = static_cast<std::size_t>(config.n_bins);
  out.cols = 1 + x.size() / config.hop;
  out.values.resize(out.rows * out.cols);
  for (int k = 0; k < config.n_bins; ++k) {
    const double fk = config.f_min * std::pow(2.0, static_cast<double>(k) / config.bins_per_octave);
    const auto nk = static_cast<std::ptrdiff_t>(std::ceil(q * fs / fk));
    out.bin_hz.push_back(fk);
    for (std::size_t tau = 0; tau < out.cols; ++tau) {
      const auto start = static_cast<std::ptrdiff_t>(tau * config.hop) - nk / 2;
      std::complex<double> acc{0.0, 0.0};
      for (std::ptrdiff_t n = start; n < start + nk; ++n) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n - start) /
                                              static_cast<double>(nk));
        const double angle = -2.0 * std::numbers::pi * fk * static_cast<double>(n) / fs;
        acc += sample(n) * w * std::complex<double>(std::cos(angle), std::sin(angle));
      }
      out.at(static_cast<std::size_t>(k), tau) = acc;
    }
  }
  return out;
}

double rel_err(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double nll_direct(std::span<const double> logits, std::size_t target) {
  long double denom = 0.0L;
  for (double z : logits) denom += std::exp(static_cast<long double>(z));
  return static_cast<double>(-(static_cast<long double>(logits[target]) - std::log(denom)));
}

double auc_pairwise(std::span<const double> scores, std::span<const int> labels) {
  double credit = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) credit += 1.0;
      else if (scores[i] == scores[j]) credit += 0.5;
    }
  }
  return credit / static_cast<double>(pairs);
}

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace tfev::oracle
