// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/signal/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfev/error.hpp"

namespace tfev::signal {

Waveform::Waveform(std::vector<double> samples, unsigned sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) throw DataError("waveform: no samples");
  if (sample_rate_ == 0) throw DataError("waveform: sample_rate must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw DataError("waveform: non-finite sample at index " + std::to_string(i));
    }
  }
}

Waveform Waveform::scaled(double gain) const {
  std::vector<double> out(samples_);
  for (double& v : out) v *= gain;
  return Waveform(std::move(out), sample_rate_);
}

Waveform resample_linear(const Waveform& in, unsigned target_rate) {
  if (target_rate == 0) throw DataError("resample: target rate must be positive");
  if (target_rate == in.sample_rate()) return in;
  const auto src = in.samples();
  const double ratio = static_cast<double>(in.sample_rate()) / target_rate;
  const auto out_len = static_cast<std::size_t>(
      std::max<double>(1.0, std::floor(static_cast<double>(src.size()) / ratio)));
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    const double a = src[std::min(i0, src.size() - 1)];
    const double b = src[std::min(i0 + 1, src.size() - 1)];
    out[i] = a + (b - a) * frac;
  }
  return Waveform(std::move(out), target_rate);
}

}  // namespace tfev::signal
