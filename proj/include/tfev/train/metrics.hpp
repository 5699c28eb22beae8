// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "tfev/evidence/manifest.hpp"
#include "tfev/model/sequence.hpp"

namespace tfev::train {

using evidence::Label;

/// Fake is the positive class.
struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t n() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Percentages in [0, 100]. A zero denominator makes precision or recall 0,
/// and F1 is 0 when precision + recall is 0.
struct ClassMetrics {
  double acc = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  Confusion counts;
};

ClassMetrics classification_metrics(std::span<const Label> labels, std::span<const Label> predictions);

/// Probability that a random fake outscores a random real, ties counted 0.5,
/// computed from average ranks. Throws DataError unless both classes occur.
double auc(std::span<const double> fake_scores, std::span<const Label> labels);

struct EvalReport {
  std::string dataset;
  std::string domain;
  std::string representation;
  model::Setting setting = model::Setting::Fused;
  double acc = 0.0;  // percent
  double f1 = 0.0;   // percent
  double auc = 0.0;  // percent
  std::size_t n_samples = 0;
  Confusion counts;
};

EvalReport make_report(std::span<const double> fake_scores, std::span<const Label> predictions,
                       std::span<const Label> labels);

/// ACC(fused) - ACC(acoustic_only), in percentage points.
double compute_gain(double fused_acc, double acoustic_acc);

/// Same, checking both reports describe one dataset and representation.
double compute_gain(const EvalReport& fused, const EvalReport& acoustic_only);

}  // namespace tfev::train
