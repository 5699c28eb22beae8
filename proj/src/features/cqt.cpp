// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/features/cqt.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tfev/error.hpp"

namespace tfev::features {

double CqtConfig::q() const { return 1.0 / (std::exp2(1.0 / bins_per_octave) - 1.0); }

double CqtConfig::center_frequency(int k) const {
  return f_min * std::exp2(static_cast<double>(k) / bins_per_octave);
}

std::vector<double> CqtConfig::center_frequencies() const {
  std::vector<double> f(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) f[static_cast<std::size_t>(k)] = center_frequency(k);
  return f;
}

std::size_t CqtConfig::window_length(int k) const {
  return static_cast<std::size_t>(std::ceil(q() * sample_rate / center_frequency(k)));
}

void CqtConfig::validate() const {
  if (!(f_min > 0.0)) throw DataError("cqt config: f_min must be positive");
  if (bins_per_octave < 1) throw DataError("cqt config: bins_per_octave must be >= 1");
  if (n_bins < 1) throw DataError("cqt config: n_bins must be >= 1");
  if (hop == 0) throw DataError("cqt config: hop must be positive");
  if (sample_rate == 0) throw DataError("cqt config: sample_rate must be positive");
  const double top = center_frequency(n_bins - 1);
  if (!(top < sample_rate / 2.0)) {
    throw DataError("cqt config: highest center frequency " + std::to_string(top) + " Hz is not below Nyquist (" +
                    std::to_string(sample_rate / 2.0) + " Hz)");
  }
}

std::vector<double> reflect_pad(std::span<const double> x, std::size_t pad) {
  if (pad >= x.size()) throw DataError("reflect_pad: padding must be shorter than the signal");
  std::vector<double> out(x.size() + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) out[i] = x[pad - i];
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < pad; ++i) out[pad + n + i] = x[n - 2 - i];
  return out;
}

namespace {

struct BinKernel {
  std::size_t length;
  double omega;  // radians per sample
  std::vector<double> re;
  std::vector<double> im;
};

std::vector<BinKernel> make_kernels(const CqtConfig& config) {
  std::vector<BinKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(config.n_bins));
  for (int k = 0; k < config.n_bins; ++k) {
    BinKernel kern;
    kern.length = config.window_length(k);
    kern.omega = 2.0 * std::numbers::pi * config.center_frequency(k) / config.sample_rate;
    const auto w = signal::hann_window(kern.length);
    kern.re.resize(kern.length);
    kern.im.resize(kern.length);
    for (std::size_t m = 0; m < kern.length; ++m) {
      const double angle = kern.omega * static_cast<double>(m);
      kern.re[m] = w[m] * std::cos(angle);
      kern.im[m] = -w[m] * std::sin(angle);
    }
    kernels.push_back(std::move(kern));
  }
  return kernels;
}

// Four independent accumulators; the inner loop is the hot spot of feature extraction.
signal::Complex dot_kernel(const double* x, const BinKernel& k) {
  double r0 = 0, r1 = 0, r2 = 0, r3 = 0, i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  const std::size_t n = k.length;
  const double* kr = k.re.data();
  const double* ki = k.im.data();
  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    r0 += x[m] * kr[m];
    i0 += x[m] * ki[m];
    r1 += x[m + 1] * kr[m + 1];
    i1 += x[m + 1] * ki[m + 1];
    r2 += x[m + 2] * kr[m + 2];
    i2 += x[m + 2] * ki[m + 2];
    r3 += x[m + 3] * kr[m + 3];
    i3 += x[m + 3] * ki[m + 3];
  }
  for (; m < n; ++m) {
    r0 += x[m] * kr[m];
    i0 += x[m] * ki[m];
  }
  return {(r0 + r1) + (r2 + r3), (i0 + i1) + (i2 + i3)};
}

}  // namespace

signal::ComplexMatrix cqt_complex(const signal::Waveform& wave, const CqtConfig& config) {
  config.validate();
  if (wave.sample_rate() != config.sample_rate) {
    throw DataError("cqt: waveform sample rate " + std::to_string(wave.sample_rate()) +
                    " Hz differs from configured " + std::to_string(config.sample_rate) + " Hz");
  }
  const std::size_t n0 = config.longest_window();
  if (wave.size() <= n0) {
    throw DataError("cqt: waveform has " + std::to_string(wave.size()) + " samples; the lowest bin needs at least " +
                    std::to_string(n0 + 1) + " (longest window N_0 = " + std::to_string(n0) + ")");
  }
  const std::size_t pad = config.edge_padding();
  const auto padded = reflect_pad(wave.samples(), pad);
  const auto kernels = make_kernels(config);

  signal::ComplexMatrix out;
  out.rows = static_cast<std::size_t>(config.n_bins);
  out.cols = config.frame_count(wave.size());
  out.values.resize(out.rows * out.cols);
  out.bin_hz = config.center_frequencies();
  out.frame_times.resize(out.cols);

  for (std::size_t tau = 0; tau < out.cols; ++tau) {
    const auto center = static_cast<std::ptrdiff_t>(tau * config.hop);
    out.frame_times[tau] = static_cast<double>(center) / config.sample_rate;
    for (std::size_t k = 0; k < out.rows; ++k) {
      const auto& kern = kernels[k];
      // Window start in original sample coordinates, then in padded coordinates.
      const std::ptrdiff_t start = center - static_cast<std::ptrdiff_t>(kern.length / 2);
      const auto padded_start = static_cast<std::size_t>(start + static_cast<std::ptrdiff_t>(pad));
      signal::Complex acc{0.0, 0.0};
      if (padded_start + kern.length <= padded.size()) {
        acc = dot_kernel(padded.data() + padded_start, kern);
      } else {
        // Tail frames can run past the padded end; samples outside are zero.
        BinKernel clipped{padded.size() - padded_start, kern.omega, kern.re, kern.im};
        acc = dot_kernel(padded.data() + padded_start, clipped);
      }
      // Shift the kernel-relative phase back to absolute sample index.
      const double phase = -kern.omega * static_cast<double>(start);
      out.at(k, tau) = acc * signal::Complex(std::cos(phase), std::sin(phase));
    }
  }
  return out;
}

TFMatrix cqt(const signal::Waveform& wave, const CqtConfig& config) {
  const auto spec = cqt_complex(wave, config);
  auto tf = make_tfmatrix(RepKind::Cqt, Scale::Magnitude, spec.rows, spec.cols, spec.bin_hz,
                          static_cast<double>(config.sample_rate) / config.hop);
  for (std::size_t i = 0; i < spec.values.size(); ++i) tf.values[i] = static_cast<float>(std::abs(spec.values[i]));
  return tf;
}

std::vector<double> uniform_resample_log_axis(std::span<const double> log_power, const CqtConfig& config) {
  const auto k = log_power.size();
  if (k != static_cast<std::size_t>(config.n_bins)) throw DataError("cqcc: bin count does not match config");
  if (k == 1) return {log_power[0]};
  const double f_lo = config.center_frequency(0);
  const double f_hi = config.center_frequency(config.n_bins - 1);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    double pos = config.bins_per_octave * std::log2(f / config.f_min);
    pos = std::clamp(pos, 0.0, static_cast<double>(k - 1));
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, k - 1);
    const double frac = pos - static_cast<double>(lo);
    out[i] = log_power[lo] + (log_power[hi] - log_power[lo]) * frac;
  }
  return out;
}

}  // namespace tfev::features
