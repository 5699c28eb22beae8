// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/sequence.hpp"

#include <algorithm>
#include <cmath>

#include "tfev/error.hpp"
#include "tfev/features/filterbank.hpp"
#include "tfev/model/tokenizer.hpp"

namespace tfev::model {

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::AudioOnly: return "audio_only";
    case Setting::AcousticOnly: return "acoustic_only";
    case Setting::Fused: return "fused";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Sys: return "sys";
    case Role::Aud: return "aud";
    case Role::Pre: return "pre";
    case Role::Vis: return "vis";
    case Role::Post: return "post";
    case Role::Answer: return "answer";
  }
  return "?";
}

Setting parse_setting(std::string_view text) {
  for (auto s : {Setting::AudioOnly, Setting::AcousticOnly, Setting::Fused}) {
    if (text == to_string(s)) return s;
  }
  throw UsageError("unknown setting '" + std::string(text) + "' (expected audio_only, acoustic_only or fused)");
}

bool uses_audio(Setting s) { return s != Setting::AcousticOnly; }
bool uses_image(Setting s) { return s != Setting::AudioOnly; }

Prompts Prompts::for_representation(features::RepKind kind) {
  static constexpr const char* kNames[] = {"CQT", "Mel", "STFT", "LFCC", "MFCC", "CQCC"};
  Prompts p;
  p.post = std::string("Here is its ") + kNames[static_cast<int>(kind)] +
           "-spectrogram. Please analyze both the audio and its spectrogram.";
  return p;
}

const Segment* TokenSequence::find(Role role) const {
  for (const auto& s : segments) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

std::size_t TokenSequence::prompt_length() const {
  const auto* a = find(Role::Answer);
  return a ? a->begin : length();
}

std::vector<Role> expected_roles(Setting setting, bool with_answer) {
  std::vector<Role> roles;
  switch (setting) {
    case Setting::Fused: roles = {Role::Sys, Role::Aud, Role::Pre, Role::Vis, Role::Post}; break;
    case Setting::AudioOnly: roles = {Role::Sys, Role::Aud, Role::Pre}; break;
    case Setting::AcousticOnly: roles = {Role::Sys, Role::Pre, Role::Vis, Role::Post}; break;
  }
  if (with_answer) roles.push_back(Role::Answer);
  return roles;
}

void validate_segments(const TokenSequence& seq) {
  const bool with_answer = !seq.segments.empty() && seq.segments.back().role == Role::Answer;
  const auto roles = expected_roles(seq.setting, with_answer);
  if (seq.segments.size() != roles.size()) {
    throw DataError("sequence: " + std::to_string(seq.segments.size()) + " segments, expected " +
                    std::to_string(roles.size()) + " for " + std::string(to_string(seq.setting)));
  }
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    const auto& s = seq.segments[i];
    if (s.role != roles[i]) {
      throw DataError("sequence: segment " + std::to_string(i) + " is " + std::string(to_string(s.role)) +
                      ", expected " + std::string(to_string(roles[i])));
    }
    if (s.begin != cursor || s.end < s.begin) throw DataError("sequence: segments are not contiguous");
    cursor = s.end;
  }
  if (cursor != seq.length()) throw DataError("sequence: segments do not cover the sequence");
}

TokenSequence assemble_sequence(Setting setting, const ModalityInputs& inputs, const Prompts& prompts,
                                std::optional<evidence::Label> answer) {
  if (uses_audio(setting) && !inputs.audio_features) {
    throw DataError("sequence: setting " + std::string(to_string(setting)) + " needs audio");
  }
  if (uses_image(setting) && !inputs.visual_tokens) {
    throw DataError("sequence: setting " + std::string(to_string(setting)) + " needs an evidence image");
  }
  TokenSequence seq;
  seq.setting = setting;
  const auto push_text = [&](Role role, const std::string& text) {
    const auto ids = tokenize_text(text);
    const std::size_t begin = seq.ids.size();
    seq.ids.insert(seq.ids.end(), ids.begin(), ids.end());
    seq.segments.push_back({role, begin, seq.ids.size()});
  };
  const auto push_slots = [&](Role role, Eigen::Index n) {
    const std::size_t begin = seq.ids.size();
    seq.ids.insert(seq.ids.end(), static_cast<std::size_t>(n), -1);
    seq.segments.push_back({role, begin, seq.ids.size()});
  };
  for (Role role : expected_roles(setting, false)) {
    switch (role) {
      case Role::Sys: push_text(role, prompts.sys); break;
      case Role::Pre: push_text(role, prompts.pre); break;
      case Role::Post: push_text(role, prompts.post); break;
      case Role::Aud:
        seq.audio_features = *inputs.audio_features;
        push_slots(role, seq.audio_features.rows());
        break;
      case Role::Vis:
        seq.visual_tokens = *inputs.visual_tokens;
        push_slots(role, seq.visual_tokens.rows());
        break;
      case Role::Answer: break;
    }
  }
  if (answer) {
    const std::size_t begin = seq.ids.size();
    seq.ids.push_back(label_token(*answer));
    seq.segments.push_back({Role::Answer, begin, seq.ids.size()});
  }
  return seq;
}

Mat audio_frame_features(const signal::Waveform& wave, const ModelConfig& config) {
  features::StftParams sp;
  sp.window = {config.mel_window, config.mel_hop};
  sp.n_fft = config.n_fft;
  if (wave.size() < config.mel_window) {
    throw DataError("audio tokens: waveform has " + std::to_string(wave.size()) + " samples, fewer than one " +
                    std::to_string(config.mel_window) + "-sample frame");
  }
  const features::FilterBank bank(features::FilterScale::Mel, config.n_mels, config.n_fft, wave.sample_rate());
  const auto energies = features::filterbank_energies(wave, sp, bank);
  const std::size_t frames = energies.front().size();
  const std::size_t s = config.token_stride;
  const std::size_t tokens = (frames + s - 1) / s;
  const double floor = config.mel_floor_db;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(tokens), static_cast<Eigen::Index>(config.n_mels));
  for (std::size_t t = 0; t < tokens; ++t) {
    const std::size_t f0 = t * s;
    const std::size_t f1 = std::min(frames, f0 + s);
    for (std::size_t m = 0; m < config.n_mels; ++m) {
      double acc = 0.0;
      for (std::size_t f = f0; f < f1; ++f) {
        const double db = std::max(floor, 10.0 * std::log10(std::max(energies[m][f], 1e-30)));
        acc += (db - floor) / -floor;
      }
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) = acc / static_cast<double>(f1 - f0);
    }
  }
  return out;
}

Mat encode_audio_tokens(const Mat& frame_features, const Params& params) {
  if (frame_features.cols() != static_cast<Eigen::Index>(params.config.n_mels)) {
    throw DataError("audio tokens: expected " + std::to_string(params.config.n_mels) + " mel bands");
  }
  return linear_forward(params.audio_aligner, linear_forward(params.audio_proj, frame_features, 0.0), 0.0);
}

Mat encode_audio_tokens(const signal::Waveform& wave, const Params& params) {
  return encode_audio_tokens(audio_frame_features(wave, params.config), params);
}

Mat image_patches(const evidence::EvidenceImage& image, const ModelConfig& config) {
  const std::size_t p = config.patch;
  if (p == 0 || image.width % p != 0 || image.height % p != 0) {
    throw DataError("visual tokens: image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                    " is not divisible by patch size " + std::to_string(p));
  }
  const std::size_t gw = image.width / p;
  const std::size_t gh = image.height / p;
  Mat out(static_cast<Eigen::Index>(gw * gh), static_cast<Eigen::Index>(3 * p * p));
  for (std::size_t gy = 0; gy < gh; ++gy) {
    for (std::size_t gx = 0; gx < gw; ++gx) {
      const auto row = static_cast<Eigen::Index>(gy * gw + gx);
      Eigen::Index col = 0;
      for (std::size_t y = 0; y < p; ++y) {
        const std::uint8_t* px = &image.pixels[((gy * p + y) * image.width + gx * p) * 3];
        for (std::size_t i = 0; i < 3 * p; ++i) out(row, col++) = px[i] / 255.0 - 0.5;
      }
    }
  }
  return out;
}

Mat encode_visual_tokens(const evidence::EvidenceImage& image, const Params& params) {
  const auto& c = params.config;
  if (image.width != c.image_width || image.height != c.image_height) {
    throw DataError("visual tokens: image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                    ", model expects " + std::to_string(c.image_width) + "x" + std::to_string(c.image_height));
  }
  Mat x = linear_forward(params.patch_embed, image_patches(image, c), 0.0);
  for (std::size_t gy = 0; gy < c.grid_h(); ++gy) {
    for (std::size_t gx = 0; gx < c.grid_w(); ++gx) {
      const auto r = static_cast<Eigen::Index>(gy * c.grid_w() + gx);
      x.row(r) += params.vis_row_pos.row(static_cast<Eigen::Index>(gy)) +
                  params.vis_col_pos.row(static_cast<Eigen::Index>(gx));
    }
  }
  return linear_forward(params.vis_aligner, x, 0.0);
}

}  // namespace tfev::model
