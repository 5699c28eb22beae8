// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used only by tests. Nothing here calls
// the code paths it is used to check.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tfev/features/cqt.hpp"
#include "tfev/signal/spectral.hpp"
#include "tfev/signal/waveform.hpp"

namespace tfev::oracle {

/// X(f_k, tau) = sum_n x[n] w_k[n - start_k(tau)] exp(-j 2 pi f_k n / fs), evaluated
/// term by term with the window and the exponential recomputed for every n.
/// Out-of-range n uses reflection within floor(N_0/2) of the edges and zero beyond.
signal::ComplexMatrix cqt_direct(const signal::Waveform& wave, const features::CqtConfig& config);

/// Relative error |a - b| / max(|a|, |b|), 0 when both are 0.
double rel_err(std::complex<double> a, std::complex<double> b);
double rel_err(double a, double b);

/// -log softmax(logits)[target] by direct summation in long double.
double nll_direct(std::span<const double> logits, std::size_t target);

/// Pairwise AUC: P(score_pos > score_neg) + 0.5 P(equal), enumerated over all pairs.
double auc_pairwise(std::span<const double> scores, std::span<const int> labels);

/// Deterministic random vector for fixtures.
std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0);

}  // namespace tfev::oracle
