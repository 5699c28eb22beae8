// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/train/optimizer.hpp"

#include <cmath>
#include <vector>

#include "tfev/error.hpp"

namespace tfev::train {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw DataError("train: lr must be positive");
  if (!(weight_decay >= 0.0)) throw DataError("train: weight_decay must be non-negative");
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) throw DataError("train: warmup_ratio must lie in [0, 1)");
  if (total_steps == 0) throw DataError("train: total_steps must be positive");
  if (batch_size == 0) throw DataError("train: batch_size must be positive");
}

std::size_t TrainConfig::warmup_steps() const {
  return static_cast<std::size_t>(std::floor(warmup_ratio * static_cast<double>(total_steps)));
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"lr", c.lr},
       {"weight_decay", c.weight_decay},
       {"warmup_ratio", c.warmup_ratio},
       {"total_steps", c.total_steps},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"setting", std::string(model::to_string(c.setting))}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.warmup_ratio = j.value("warmup_ratio", c.warmup_ratio);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("setting")) c.setting = model::parse_setting(j.at("setting").get<std::string>());
}

double lr_at(std::size_t step, const TrainConfig& config) {
  const std::size_t warmup = config.warmup_steps();
  if (warmup == 0 || step >= warmup) return config.lr;
  return config.lr * static_cast<double>(step) / static_cast<double>(warmup);
}

void adamw_update(Mat& param, const Mat& grad, Mat& m, Mat& v, std::size_t t, double lr, bool decay,
                  const AdamWConfig& config) {
  if (t == 0) throw DataError("adamw: step index starts at 1");
  if (decay) param *= 1.0 - lr * config.weight_decay;
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config.eps);
}

AdamState make_adam_state(const model::Params& params) {
  return {model::zeros_like(params), model::zeros_like(params)};
}

void adamw_step(model::Params& params, const model::Params& grads, AdamState& state, std::size_t t, double lr,
                const AdamWConfig& config) {
  std::vector<const Mat*> g;
  std::vector<Mat*> m, v;
  for_each_tensor(grads, [&](const std::string& name, const Mat& x, model::TensorInfo info) {
    if (info.trainable && !x.allFinite()) throw DataError("adamw: non-finite gradient in tensor '" + name + "'");
    g.push_back(&x);
  });
  for_each_tensor(state.m, [&](const std::string&, Mat& x, model::TensorInfo) { m.push_back(&x); });
  for_each_tensor(state.v, [&](const std::string&, Mat& x, model::TensorInfo) { v.push_back(&x); });
  std::size_t i = 0;
  for_each_tensor(params, [&](const std::string& name, Mat& p, model::TensorInfo info) {
    if (i >= g.size() || g[i]->rows() != p.rows() || g[i]->cols() != p.cols()) {
      throw DataError("adamw: gradient shape mismatch at tensor '" + name + "'");
    }
    if (info.trainable) adamw_update(p, *g[i], *m[i], *v[i], t, lr, info.decay, config);
    ++i;
  });
}

}  // namespace tfev::train
