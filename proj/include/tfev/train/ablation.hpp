// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfev/model/params.hpp"
#include "tfev/model/sequence.hpp"
#include "tfev/train/metrics.hpp"
#include "tfev/train/optimizer.hpp"
#include "tfev/train/trainer.hpp"

namespace tfev::train {

struct AblationData {
  Dataset train;
  Dataset in_domain;
  Dataset shifted;
};

struct SettingResult {
  model::Setting setting = model::Setting::Fused;
  EvalReport in_domain;
  EvalReport shifted;
  double final_loss = 0.0;
  std::string checkpoint_digest;
  model::Params params;

  /// In-domain minus shifted accuracy, in percentage points.
  double drop() const { return in_domain.acc - shifted.acc; }
};

struct AblationReport {
  std::vector<SettingResult> rows;  // audio_only, acoustic_only, fused
  double gain_in_domain = 0.0;
  double gain_shifted = 0.0;

  const SettingResult& at(model::Setting setting) const;
};

/// Trains and evaluates every input setting from the same initial weights,
/// seed and step budget.
AblationReport run_ablation(const AblationData& data, const model::ModelConfig& model_config,
                            const TrainConfig& train_config, const model::Prompts& prompts);

/// One row per (setting, domain) and one gain row per domain, preceded by
/// '#' lines echoing `echo`.
void write_ablation_csv(std::ostream& out, const AblationReport& report, const nlohmann::json& echo);

/// Aligned text table: one line per setting with in-domain and shifted metrics.
void write_ablation_table(std::ostream& out, const AblationReport& report);

}  // namespace tfev::train
