// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/features/representation.hpp"

namespace tfev::features {

void to_json(nlohmann::json& j, const CqtConfig& c) {
  j = {{"f_min", c.f_min},
       {"bins_per_octave", c.bins_per_octave},
       {"n_bins", c.n_bins},
       {"hop", c.hop},
       {"sample_rate", c.sample_rate}};
}

void from_json(const nlohmann::json& j, CqtConfig& c) {
  c.f_min = j.value("f_min", c.f_min);
  c.bins_per_octave = j.value("bins_per_octave", c.bins_per_octave);
  c.n_bins = j.value("n_bins", c.n_bins);
  c.hop = j.value("hop", c.hop);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
}

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = {{"cqt", c.cqt},
       {"stft_window", c.stft.window.length},
       {"stft_hop", c.stft.window.hop},
       {"n_fft", c.stft.n_fft},
       {"n_mels", c.n_mels},
       {"n_cep_filters", c.n_cep_filters},
       {"n_coeffs", c.n_coeffs},
       {"floor_db", c.floor_db}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  if (j.contains("cqt")) c.cqt = j.at("cqt").get<CqtConfig>();
  c.stft.window.length = j.value("stft_window", c.stft.window.length);
  c.stft.window.hop = j.value("stft_hop", c.stft.window.hop);
  c.stft.n_fft = j.value("n_fft", c.stft.n_fft);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.n_cep_filters = j.value("n_cep_filters", c.n_cep_filters);
  c.n_coeffs = j.value("n_coeffs", c.n_coeffs);
  c.floor_db = j.value("floor_db", c.floor_db);
}

TFMatrix compute_representation(const signal::Waveform& wave, RepKind kind, const FeatureConfig& config) {
  switch (kind) {
    case RepKind::Cqt:
      return magnitude_to_db_maxref(cqt(wave, config.cqt), config.floor_db);
    case RepKind::Mel:
      return mel_spectrogram(wave, config.stft, config.n_mels, config.floor_db);
    case RepKind::Stft:
      return stft_db(wave, config.stft, config.floor_db);
    case RepKind::Lfcc:
    case RepKind::Mfcc:
    case RepKind::Cqcc: {
      CepstralConfig cep;
      cep.stft = config.stft;
      cep.n_filters = config.n_cep_filters;
      cep.n_coeffs = config.n_coeffs;
      cep.cqt = config.cqt;
      return cepstral(wave, kind, cep);
    }
  }
  return {};
}

}  // namespace tfev::features
