// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tfev/evidence/manifest.hpp"
#include "tfev/signal/waveform.hpp"

namespace tfev::ingest {

enum class SynthDomain { A, B };

std::string_view to_string(SynthDomain d);
SynthDomain parse_domain(std::string_view text);

struct ArtifactKinds {
  bool notch = true;
  bool phase_reset = true;
  bool boundary_smoothing = true;
};

/// Fixed artifact and domain constants. Changing any of these changes every corpus.
struct SynthConstants {
  // Spectral notch applied to the whole fake utterance.
  static constexpr double kNotchLowHz = 1800.0;
  static constexpr double kNotchHighHz = 2200.0;
  static constexpr double kNotchDepthDb = -40.0;
  // Oscillator phases restart at every multiple of this period.
  static constexpr double kPhaseResetPeriodS = 0.050;
  // Magnitude spectra of frames within kBoundaryHalfWidthS of a vocoder frame
  // boundary are averaged over kSmoothingBins neighbouring bins.
  static constexpr double kVocoderFrameS = 0.020;
  static constexpr double kBoundaryHalfWidthS = 0.004;
  static constexpr int kSmoothingBins = 5;
  // Per-domain fundamental range and noise level (dB relative to the voiced part).
  static constexpr double kF0LowA = 100.0, kF0HighA = 160.0;
  static constexpr double kF0LowB = 170.0, kF0HighB = 240.0;
  static constexpr double kNoiseDbA = -20.0;
  static constexpr double kNoiseDbB = -10.0;
};

struct SynthConfig {
  std::size_t n_samples = 64;
  double duration_s = 1.25;
  unsigned sample_rate = 16000;
  SynthDomain domain = SynthDomain::A;
  std::uint64_t seed = 0;
  ArtifactKinds artifacts{};

  /// n_samples even and positive, duration >= 0.5 s.
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

struct SynthUtterance {
  signal::Waveform wave;
  evidence::Label label;
};

/// Utterance `index` of the corpus. Even indices are real, odd are fake, so
/// any even-sized corpus is exactly balanced. Depends only on (config, index).
SynthUtterance synth_utterance(const SynthConfig& config, std::size_t index);

struct SynthOutput {
  std::filesystem::path dir;
  std::string prefix = "utt";
  evidence::Split split = evidence::Split::Train;
};

/// Writes <dir>/<prefix>_<domain>_<index>.wav for every utterance and returns
/// the manifest (image_path empty). Paths in the manifest are file names
/// relative to `dir`.
evidence::Manifest synth_dataset(const SynthConfig& config, const SynthOutput& output);

}  // namespace tfev::ingest
