// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfev/evidence/image.hpp"
#include "tfev/evidence/manifest.hpp"
#include "tfev/features/representation.hpp"
#include "tfev/model/params.hpp"
#include "tfev/model/sequence.hpp"
#include "tfev/train/metrics.hpp"
#include "tfev/train/optimizer.hpp"

namespace tfev::train {

/// Model inputs of one manifest record that do not depend on trainable weights.
struct PreparedSample {
  std::string id;  // audio path as written in the manifest
  Label label = Label::Real;
  std::string domain;
  Mat audio_features;             // pooled log-mel frames
  evidence::EvidenceImage image;  // evidence image at the model's input size
};

struct Dataset {
  std::string name;
  features::RepKind representation = features::RepKind::Cqt;
  std::vector<PreparedSample> samples;
};

struct PrepareOptions {
  features::RepKind representation = features::RepKind::Cqt;
  features::FeatureConfig features{};
  evidence::Colormap colormap = evidence::Colormap::Viridis;
  /// Render the evidence image from audio when image_path is empty or absent.
  bool render_missing = true;
};

/// Loads audio and evidence images for every record. Paths resolve against
/// manifest_dir. Throws DataError when an image does not match the model's
/// input size or cannot be obtained.
Dataset prepare_dataset(const evidence::Manifest& manifest, const std::filesystem::path& manifest_dir,
                        const model::ModelConfig& config, const PrepareOptions& options, std::string name = {});

/// Modality inputs for every sample. Visual tokens come from frozen weights,
/// so they are computed once and reused for a whole run.
std::vector<model::ModalityInputs> encode_inputs(const Dataset& data, const model::Params& params,
                                                 model::Setting setting);

struct LossPoint {
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  model::Params params;
  std::vector<LossPoint> curve;
};

/// Supervised fine-tuning on the answer token. Step t = 1..total_steps uses
/// lr_at(t) and the mean gradient over a batch drawn from a per-epoch shuffle
/// seeded by config.seed. Throws DataError on an empty dataset.
TrainResult train(const Dataset& data, model::Params params, const TrainConfig& config,
                  const model::Prompts& prompts);

/// Loss curve as CSV, preceded by '#' lines echoing the configs and seed.
void write_loss_curve(std::ostream& out, const std::vector<LossPoint>& curve, const nlohmann::json& echo);

struct EvalResult {
  EvalReport report;
  std::vector<double> p_fake;
  std::vector<Label> predictions;
};

/// Scores every sample in order. AUC needs both classes present.
EvalResult evaluate(const Dataset& data, const model::Params& params, model::Setting setting,
                    const model::Prompts& prompts);

}  // namespace tfev::train
