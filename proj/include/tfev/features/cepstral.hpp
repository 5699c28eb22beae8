// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tfev/features/cqt.hpp"
#include "tfev/features/filterbank.hpp"
#include "tfev/features/tfmatrix.hpp"

namespace tfev::features {

/// Orthonormal DCT-II and its inverse (DCT-III with matching scaling).
std::vector<double> dct2_orthonormal(std::span<const double> x);
std::vector<double> idct2_orthonormal(std::span<const double> c);

struct CepstralConfig {
  StftParams stft{};
  std::size_t n_filters = 40;  // mel or linear triangles for MFCC / LFCC
  std::size_t n_coeffs = 20;
  std::optional<CqtConfig> cqt;  // required for CQCC
};

/// MFCC / LFCC / CQCC, n_coeffs x frames.
///
/// MFCC and LFCC take the natural log of mel / linear filterbank energies;
/// CQCC takes the log power of the CQT after resampling its geometric axis
/// onto a uniform grid. All keep the first n_coeffs orthonormal DCT-II terms.
TFMatrix cepstral(const signal::Waveform& wave, RepKind kind, const CepstralConfig& config);

}  // namespace tfev::features
