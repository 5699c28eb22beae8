// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "tfev/model/params.hpp"
#include "tfev/model/sequence.hpp"

namespace tfev::train {

using model::Mat;

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.1;
};

struct TrainConfig {
  double lr = 5e-5;
  double weight_decay = 0.1;
  double warmup_ratio = 0.01;
  std::size_t total_steps = 500;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  model::Setting setting = model::Setting::Fused;

  /// Positive sizes and rates, warmup ratio in [0, 1).
  void validate() const;
  std::size_t warmup_steps() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Linear ramp from 0 to lr over warmup_steps(), then constant.
double lr_at(std::size_t step, const TrainConfig& config);

/// One AdamW update of a single tensor. Decay, when enabled, multiplies the
/// parameter by (1 - lr * weight_decay) before the Adam step.
void adamw_update(Mat& param, const Mat& grad, Mat& m, Mat& v, std::size_t t, double lr, bool decay,
                  const AdamWConfig& config);

struct AdamState {
  model::Params m;
  model::Params v;
};

AdamState make_adam_state(const model::Params& params);

/// Updates every trainable tensor of params; frozen tensors are not touched.
/// Throws DataError naming the tensor if any trainable gradient is non-finite.
void adamw_step(model::Params& params, const model::Params& grads, AdamState& state, std::size_t t, double lr,
                const AdamWConfig& config);

}  // namespace tfev::train
