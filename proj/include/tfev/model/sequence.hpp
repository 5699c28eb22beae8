// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfev/evidence/image.hpp"
#include "tfev/evidence/manifest.hpp"
#include "tfev/features/tfmatrix.hpp"
#include "tfev/model/params.hpp"
#include "tfev/signal/waveform.hpp"

namespace tfev::model {

enum class Setting { AudioOnly, AcousticOnly, Fused };
enum class Role { Sys, Aud, Pre, Vis, Post, Answer };

std::string_view to_string(Setting s);
std::string_view to_string(Role r);
Setting parse_setting(std::string_view text);

bool uses_audio(Setting s);
bool uses_image(Setting s);

struct Prompts {
  std::string sys = "You are a speech forensics assistant.";
  std::string pre = "Could you verify whether this audio is real or fake?";
  std::string post = "Here is its CQT-spectrogram. Please analyze both the audio and its spectrogram.";

  /// Default prompts with the representation named in the post prompt.
  static Prompts for_representation(features::RepKind kind);
};

/// Half-open [begin, end) span of 0-based positions.
struct Segment {
  Role role;
  std::size_t begin;
  std::size_t end;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct TokenSequence {
  Setting setting = Setting::Fused;
  std::vector<Segment> segments;
  std::vector<int> ids;  // token id per position, -1 on audio and visual slots
  Mat audio_features;    // one row per audio token, n_mels columns (before projection)
  Mat visual_tokens;     // one row per visual token, d columns (frozen encoder output)

  std::size_t length() const { return ids.size(); }
  const Segment* find(Role role) const;
  /// Length of everything before the answer span.
  std::size_t prompt_length() const;
};

/// Role order for a setting, optionally followed by the answer.
std::vector<Role> expected_roles(Setting setting, bool with_answer);

/// Throws DataError unless the segments are contiguous, cover the sequence,
/// and follow expected_roles exactly.
void validate_segments(const TokenSequence& seq);

struct ModalityInputs {
  std::optional<Mat> audio_features;
  std::optional<Mat> visual_tokens;
};

/// [sys; aud; pre; vis; post] for fused, [sys; aud; pre] for audio_only,
/// [sys; pre; vis; post] for acoustic_only. With a label, one answer token is
/// appended. Throws DataError if a modality the setting needs is missing.
TokenSequence assemble_sequence(Setting setting, const ModalityInputs& inputs, const Prompts& prompts,
                                std::optional<evidence::Label> answer = std::nullopt);

/// Pooled log-mel frames: T = ceil(n_frames / token_stride) rows of n_mels
/// values, each (dB - floor) / -floor with dB clamped at the floor.
Mat audio_frame_features(const signal::Waveform& wave, const ModelConfig& config);

/// Audio tokens (T x d): projection then frozen aligner.
Mat encode_audio_tokens(const Mat& frame_features, const Params& params);
Mat encode_audio_tokens(const signal::Waveform& wave, const Params& params);

/// Flattened p x p RGB patches in raster order, values scaled to [-0.5, 0.5].
Mat image_patches(const evidence::EvidenceImage& image, const ModelConfig& config);

/// Visual tokens (N x d): patch embedding, 2-D position embedding, frozen aligner.
Mat encode_visual_tokens(const evidence::EvidenceImage& image, const Params& params);

}  // namespace tfev::model
