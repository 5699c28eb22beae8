// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

#include "tfev/features/cepstral.hpp"
#include "tfev/features/cqt.hpp"
#include "tfev/features/filterbank.hpp"
#include "tfev/features/tfmatrix.hpp"

namespace tfev::features {

/// Parameters for all six representations.
struct FeatureConfig {
  CqtConfig cqt{};
  StftParams stft{};
  std::size_t n_mels = 80;
  std::size_t n_cep_filters = 40;
  std::size_t n_coeffs = 20;
  double floor_db = -80.0;
};

void to_json(nlohmann::json& j, const CqtConfig& c);
void from_json(const nlohmann::json& j, CqtConfig& c);
void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);

/// The matrix that gets rendered for `kind`: dB for Cqt / Mel / Stft, raw
/// coefficients for the cepstra.
TFMatrix compute_representation(const signal::Waveform& wave, RepKind kind, const FeatureConfig& config);

}  // namespace tfev::features
