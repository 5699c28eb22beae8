// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfev::signal {

/// Mono PCM signal with amplitudes in [-1, 1].
class Waveform {
 public:
  /// Throws DataError if `samples` is empty, contains non-finite values, or `sample_rate` is 0.
  Waveform(std::vector<double> samples, unsigned sample_rate);

  std::span<const double> samples() const { return samples_; }
  unsigned sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  double duration_seconds() const { return static_cast<double>(samples_.size()) / sample_rate_; }

  /// Elementwise gain; the result must still be finite.
  Waveform scaled(double gain) const;

 private:
  std::vector<double> samples_;
  unsigned sample_rate_;
};

/// Linear-interpolation resampler. Opt-in: nothing in the pipeline calls it implicitly.
Waveform resample_linear(const Waveform& in, unsigned target_rate);

}  // namespace tfev::signal
