// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/ingest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tfev/error.hpp"
#include "tfev/random.hpp"
#include "tfev/signal/spectral.hpp"
#include "tfev/signal/wav.hpp"

namespace tfev::ingest {

std::string_view to_string(SynthDomain d) { return d == SynthDomain::A ? "A" : "B"; }

SynthDomain parse_domain(std::string_view text) {
  if (text == "A" || text == "a") return SynthDomain::A;
  if (text == "B" || text == "b") return SynthDomain::B;
  throw DataError("synth: unknown domain '" + std::string(text) + "' (expected A or B)");
}

void SynthConfig::validate() const {
  if (n_samples == 0 || n_samples % 2 != 0) throw DataError("synth: n_samples must be even and positive");
  if (!(duration_s >= 0.5)) throw DataError("synth: duration must be at least 0.5 s");
  if (sample_rate < 8000) throw DataError("synth: sample_rate must be at least 8000 Hz");
}

void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = {{"n_samples", c.n_samples},
       {"duration_s", c.duration_s},
       {"sample_rate", c.sample_rate},
       {"domain", std::string(to_string(c.domain))},
       {"seed", c.seed},
       {"notch", c.artifacts.notch},
       {"phase_reset", c.artifacts.phase_reset},
       {"boundary_smoothing", c.artifacts.boundary_smoothing}};
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
  c.n_samples = j.value("n_samples", c.n_samples);
  c.duration_s = j.value("duration_s", c.duration_s);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  if (j.contains("domain")) c.domain = parse_domain(j.at("domain").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.artifacts.notch = j.value("notch", c.artifacts.notch);
  c.artifacts.phase_reset = j.value("phase_reset", c.artifacts.phase_reset);
  c.artifacts.boundary_smoothing = j.value("boundary_smoothing", c.artifacts.boundary_smoothing);
}

namespace {

using signal::Complex;
using K = SynthConstants;

double rms(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

// Paul Kellet's economy pink filter over white Gaussian noise.
std::vector<double> pink_noise(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double white = rng.normal();
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    out[i] = b0 + b1 + b2 + white * 0.1848;
  }
  return out;
}

// Pink noise plus white noise at 9x its power, so the upper band is never empty.
std::vector<double> pinkish_noise(std::size_t n, Rng& rng) {
  auto out = pink_noise(n, rng);
  const double g = 1.0 / rms(out);
  for (double& v : out) v = v * g + 3.0 * rng.normal();
  return out;
}

std::vector<double> voiced_part(std::size_t n, double fs, bool phase_reset, SynthDomain domain, Rng& rng) {
  const double f0 = domain == SynthDomain::A ? rng.uniform(K::kF0LowA, K::kF0HighA)
                                             : rng.uniform(K::kF0LowB, K::kF0HighB);
  const auto harmonics = static_cast<int>(rng.integer(3, 6));
  std::vector<double> amp(static_cast<std::size_t>(harmonics));
  for (int h = 0; h < harmonics; ++h) amp[static_cast<std::size_t>(h)] = rng.uniform(0.8, 1.2) / (h + 1);
  const double vib_rate = rng.uniform(4.5, 6.5);
  const double vib_depth = rng.uniform(0.01, 0.02);
  const double vib_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double syl_rate = rng.uniform(3.0, 4.5);
  const double syl_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const auto reset_period = static_cast<std::size_t>(std::lround(K::kPhaseResetPeriodS * fs));
  std::vector<double> out(n);
  double phase = 0.0;  // fundamental phase, radians
  for (std::size_t i = 0; i < n; ++i) {
    if (phase_reset && i > 0 && i % reset_period == 0) phase = 0.0;
    const double t = static_cast<double>(i) / fs;
    const double inst_f0 = f0 * (1.0 + vib_depth * std::sin(2.0 * std::numbers::pi * vib_rate * t + vib_phase));
    double v = 0.0;
    for (int h = 0; h < harmonics; ++h) v += amp[static_cast<std::size_t>(h)] * std::sin((h + 1) * phase);
    const double envelope = 0.65 + 0.35 * std::sin(2.0 * std::numbers::pi * syl_rate * t + syl_phase);
    out[i] = v * envelope;
    phase += 2.0 * std::numbers::pi * inst_f0 / fs;
    if (phase > 2.0 * std::numbers::pi * 64.0) phase = std::fmod(phase, 2.0 * std::numbers::pi);
  }
  // 10 ms raised-cosine fades.
  const auto fade = std::min<std::size_t>(n / 2, static_cast<std::size_t>(0.01 * fs));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(fade)));
    out[i] *= g;
    out[n - 1 - i] *= g;
  }
  return out;
}

std::vector<Complex> inverse_fft(std::vector<Complex> spec) {
  for (auto& c : spec) c = std::conj(c);
  auto t = signal::fft(std::span<const Complex>(spec));
  const double n = static_cast<double>(t.size());
  for (auto& c : t) c = std::conj(c) / n;
  return t;
}

// STFT analysis / overlap-add resynthesis applying the notch and the
// boundary smoothing. Hann analysis and synthesis windows at hop N/4.
std::vector<double> spectral_artifacts(const std::vector<double>& x, double fs, const ArtifactKinds& kinds) {
  constexpr std::size_t kN = 512;
  constexpr std::size_t kHop = 128;
  const auto w = signal::hann_window(kN);
  const std::size_t n = x.size();
  // Pad so every sample is covered by full overlap.
  std::vector<double> padded(n + 2 * kN, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + kN);
  std::vector<double> acc(padded.size(), 0.0);
  std::vector<double> norm(padded.size(), 0.0);
  const double notch_gain = std::pow(10.0, K::kNotchDepthDb / 20.0);
  const std::size_t bins = kN / 2 + 1;
  std::vector<Complex> frame(kN);
  std::vector<double> mag(bins), smoothed(bins);

  for (std::size_t start = 0; start + kN <= padded.size(); start += kHop) {
    for (std::size_t i = 0; i < kN; ++i) frame[i] = padded[start + i] * w[i];
    auto spec = signal::fft(std::span<const Complex>(frame));
    if (kinds.notch) {
      for (std::size_t m = 0; m < bins; ++m) {
        const double hz = static_cast<double>(m) * fs / kN;
        if (hz >= K::kNotchLowHz && hz <= K::kNotchHighHz) spec[m] *= notch_gain;
      }
    }
    if (kinds.boundary_smoothing) {
      const double center_s = (static_cast<double>(start + kN / 2) - static_cast<double>(kN)) / fs;
      const double offset = std::fmod(std::max(center_s, 0.0), K::kVocoderFrameS);
      const double dist = std::min(offset, K::kVocoderFrameS - offset);
      if (center_s >= 0.0 && dist <= K::kBoundaryHalfWidthS) {
        for (std::size_t m = 0; m < bins; ++m) mag[m] = std::abs(spec[m]);
        const int half = K::kSmoothingBins / 2;
        for (std::size_t m = 0; m < bins; ++m) {
          double s = 0.0;
          int count = 0;
          for (int d = -half; d <= half; ++d) {
            const auto j = static_cast<std::ptrdiff_t>(m) + d;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(bins)) continue;
            s += mag[static_cast<std::size_t>(j)];
            ++count;
          }
          smoothed[m] = s / count;
        }
        for (std::size_t m = 0; m < bins; ++m) {
          spec[m] = std::polar(smoothed[m], std::arg(spec[m]));
        }
      }
    }
    // Keep the spectrum Hermitian so the resynthesis is real.
    for (std::size_t m = 1; m < kN / 2; ++m) spec[kN - m] = std::conj(spec[m]);
    spec[0] = Complex(spec[0].real(), 0.0);
    spec[kN / 2] = Complex(spec[kN / 2].real(), 0.0);
    const auto t = inverse_fft(std::move(spec));
    for (std::size_t i = 0; i < kN; ++i) {
      acc[start + i] += t[i].real() * w[i];
      norm[start + i] += w[i] * w[i];
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = norm[kN + i];
    out[i] = z > 1e-9 ? acc[kN + i] / z : 0.0;
  }
  return out;
}

}  // namespace

SynthUtterance synth_utterance(const SynthConfig& config, std::size_t index) {
  config.validate();
  const bool fake = index % 2 == 1;
  const std::uint64_t domain_salt = config.domain == SynthDomain::A ? 0xA : 0xB;
  Rng rng(mix_seed(mix_seed(config.seed, domain_salt), index));
  const double fs = config.sample_rate;
  const auto n = static_cast<std::size_t>(std::lround(config.duration_s * fs));

  auto voice = voiced_part(n, fs, fake && config.artifacts.phase_reset, config.domain, rng);
  const double voice_rms = rms(voice);
  for (double& v : voice) v *= 0.1 / voice_rms;

  const double noise_db = (config.domain == SynthDomain::A ? K::kNoiseDbA : K::kNoiseDbB) + rng.uniform(-3.0, 3.0);
  auto noise = pinkish_noise(n, rng);
  const double noise_gain = 0.1 * std::pow(10.0, noise_db / 20.0) / rms(noise);
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = voice[i] + noise[i] * noise_gain;

  if (fake && (config.artifacts.notch || config.artifacts.boundary_smoothing)) {
    mix = spectral_artifacts(mix, fs, config.artifacts);
  }
  const double level = rng.uniform(0.7, 1.3);
  double peak = 0.0;
  for (double& v : mix) {
    v *= level;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.95) {
    for (double& v : mix) v *= 0.95 / peak;
  }
  return {signal::Waveform(std::move(mix), config.sample_rate), fake ? evidence::Label::Fake : evidence::Label::Real};
}

evidence::Manifest synth_dataset(const SynthConfig& config, const SynthOutput& output) {
  config.validate();
  std::filesystem::create_directories(output.dir);
  evidence::Manifest manifest;
  manifest.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    auto utt = synth_utterance(config, i);
    char name[96];
    std::snprintf(name, sizeof(name), "%s_%s_%04zu.wav", output.prefix.c_str(), to_string(config.domain).data(), i);
    signal::write_wav(utt.wave, output.dir / name);
    evidence::Sample s;
    s.audio_path = name;
    s.label = utt.label;
    s.split = output.split;
    s.domain = std::string(to_string(config.domain));
    manifest.push_back(std::move(s));
  }
  return manifest;
}

}  // namespace tfev::ingest
