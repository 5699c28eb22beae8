// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/train/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "tfev/error.hpp"

namespace tfev::train {

ClassMetrics classification_metrics(std::span<const Label> labels, std::span<const Label> predictions) {
  if (labels.size() != predictions.size()) {
    throw DataError("metrics: " + std::to_string(labels.size()) + " labels but " +
                    std::to_string(predictions.size()) + " predictions");
  }
  ClassMetrics m;
  auto& c = m.counts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] == Label::Fake;
    const bool pred = predictions[i] == Label::Fake;
    if (truth && pred) ++c.tp;
    else if (!truth && pred) ++c.fp;
    else if (!truth && !pred) ++c.tn;
    else ++c.fn;
  }
  if (c.n() == 0) return m;
  m.acc = 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(c.n());
  const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.precision = 100.0 * p;
  m.recall = 100.0 * r;
  m.f1 = p + r == 0.0 ? 0.0 : 100.0 * 2.0 * p * r / (p + r);
  return m;
}

double auc(std::span<const double> fake_scores, std::span<const Label> labels) {
  if (fake_scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  const std::size_t n = fake_scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fake_scores[a] < fake_scores[b]; });
  // Sum of 1-based average ranks of the positives; every value is a multiple of 0.5.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && fake_scores[order[j]] == fake_scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Label::Fake) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: needs at least one real and one fake sample");
  const double u = rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport make_report(std::span<const double> fake_scores, std::span<const Label> predictions,
                       std::span<const Label> labels) {
  const auto m = classification_metrics(labels, predictions);
  EvalReport r;
  r.acc = m.acc;
  r.f1 = m.f1;
  r.auc = 100.0 * auc(fake_scores, labels);
  r.n_samples = labels.size();
  r.counts = m.counts;
  return r;
}

double compute_gain(double fused_acc, double acoustic_acc) { return fused_acc - acoustic_acc; }

double compute_gain(const EvalReport& fused, const EvalReport& acoustic_only) {
  if (fused.dataset != acoustic_only.dataset || fused.representation != acoustic_only.representation) {
    throw DataError("gain: reports describe different datasets ('" + fused.dataset + "' vs '" +
                    acoustic_only.dataset + "') or representations");
  }
  return compute_gain(fused.acc, acoustic_only.acc);
}

}  // namespace tfev::train
