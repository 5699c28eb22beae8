// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/train/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "tfev/error.hpp"
#include "tfev/evidence/sample.hpp"
#include "tfev/model/transformer.hpp"
#include "tfev/random.hpp"
#include "tfev/signal/wav.hpp"

namespace tfev::train {

namespace {

evidence::EvidenceImage load_or_render(const evidence::Sample& s, const std::filesystem::path& dir,
                                       const signal::Waveform& wave, const model::ModelConfig& config,
                                       const PrepareOptions& options) {
  if (!s.image_path.empty()) {
    const auto path = evidence::resolve_path(dir, s.image_path);
    if (std::filesystem::exists(path)) return evidence::read_ppm(path);
    if (!options.render_missing) throw IoError("prepare: evidence image '" + path.string() + "' not found");
  } else if (!options.render_missing) {
    throw DataError("prepare: sample '" + s.audio_path + "' has no image_path");
  }
  const evidence::RenderConfig render{config.image_width, config.image_height, options.colormap};
  return evidence::evidence_image(wave, options.representation, options.features, render);
}

}  // namespace

Dataset prepare_dataset(const evidence::Manifest& manifest, const std::filesystem::path& manifest_dir,
                        const model::ModelConfig& config, const PrepareOptions& options, std::string name) {
  Dataset data;
  data.name = std::move(name);
  data.representation = options.representation;
  data.samples.reserve(manifest.size());
  for (const auto& s : manifest) {
    const auto wave = signal::load_wav(evidence::resolve_path(manifest_dir, s.audio_path));
    PreparedSample p;
    p.id = s.audio_path;
    p.label = s.label;
    p.domain = s.domain;
    p.audio_features = model::audio_frame_features(wave, config);
    p.image = load_or_render(s, manifest_dir, wave, config, options);
    if (p.image.width != config.image_width || p.image.height != config.image_height) {
      throw DataError("prepare: image for '" + s.audio_path + "' is " + std::to_string(p.image.width) + "x" +
                      std::to_string(p.image.height) + ", model expects " + std::to_string(config.image_width) +
                      "x" + std::to_string(config.image_height));
    }
    data.samples.push_back(std::move(p));
  }
  return data;
}

std::vector<model::ModalityInputs> encode_inputs(const Dataset& data, const model::Params& params,
                                                 model::Setting setting) {
  std::vector<model::ModalityInputs> out(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    if (model::uses_audio(setting)) {
      if (s.audio_features.rows() == 0) throw DataError("inputs: sample '" + s.id + "' has no audio");
      out[i].audio_features = s.audio_features;
    }
    if (model::uses_image(setting)) {
      if (s.image.pixels.empty()) throw DataError("inputs: sample '" + s.id + "' has no evidence image");
      out[i].visual_tokens = model::encode_visual_tokens(s.image, params);
    }
  }
  return out;
}

TrainResult train(const Dataset& data, model::Params params, const TrainConfig& config,
                  const model::Prompts& prompts) {
  config.validate();
  if (data.samples.empty()) throw DataError("train: dataset '" + data.name + "' has no samples");
  const auto inputs = encode_inputs(data, params, config.setting);
  std::vector<model::TokenSequence> seqs;
  seqs.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    seqs.push_back(model::assemble_sequence(config.setting, inputs[i], prompts, data.samples[i].label));
  }

  const AdamWConfig adam{.weight_decay = config.weight_decay};
  AdamState state = make_adam_state(params);
  TrainResult result;
  result.curve.reserve(config.total_steps);

  std::vector<std::size_t> order(seqs.size());
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  const auto next_index = [&]() {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), 0);
      Rng rng(mix_seed(config.seed, epoch++));
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i - 1)))]);
      }
      cursor = 0;
    }
    return order[cursor++];
  };

  for (std::size_t t = 1; t <= config.total_steps; ++t) {
    model::Params grads = model::zeros_like(params);
    double loss = 0.0;
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      loss += model::sequence_loss_and_grad(seqs[next_index()], params, grads);
    }
    const double inv = 1.0 / static_cast<double>(config.batch_size);
    for_each_tensor(grads, [&](const std::string&, Mat& g, model::TensorInfo) { g *= inv; });
    const double lr = lr_at(t, config);
    adamw_step(params, grads, state, t, lr, adam);
    result.curve.push_back({t, lr, loss * inv});
  }
  result.params = std::move(params);
  return result;
}

void write_loss_curve(std::ostream& out, const std::vector<LossPoint>& curve, const nlohmann::json& echo) {
  for (const auto& [key, value] : echo.items()) out << "# " << key << '=' << value.dump() << '\n';
  out << "step,lr,loss\n";
  out.precision(17);
  for (const auto& p : curve) out << p.step << ',' << p.lr << ',' << p.loss << '\n';
}

EvalResult evaluate(const Dataset& data, const model::Params& params, model::Setting setting,
                    const model::Prompts& prompts) {
  if (data.samples.empty()) throw DataError("evaluate: dataset '" + data.name + "' has no samples");
  const auto inputs = encode_inputs(data, params, setting);
  EvalResult r;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto score = model::predict_score(model::assemble_sequence(setting, inputs[i], prompts), params);
    r.p_fake.push_back(score.p_fake);
    r.predictions.push_back(score.label);
    labels.push_back(data.samples[i].label);
  }
  r.report = make_report(r.p_fake, r.predictions, labels);
  r.report.dataset = data.name;
  r.report.representation = std::string(features::to_string(data.representation));
  r.report.setting = setting;
  r.report.domain = data.samples.front().domain;
  return r;
}

}  // namespace tfev::train
