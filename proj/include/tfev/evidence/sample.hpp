// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "tfev/evidence/image.hpp"
#include "tfev/evidence/manifest.hpp"
#include "tfev/features/representation.hpp"
#include "tfev/signal/waveform.hpp"

namespace tfev::evidence {

/// The rendered view of a waveform: render_evidence(compute_representation(x, kind)).
/// For kind = Cqt this is render(minmax(dB(|CQT|))).
EvidenceImage evidence_image(const signal::Waveform& wave, features::RepKind kind,
                             const features::FeatureConfig& features, const RenderConfig& render);

struct SampleLocation {
  std::filesystem::path audio_path;  // written if missing
  std::filesystem::path image_path;  // always (re)written as PPM
};

/// Builds (x, cqt(x), y): ensures the audio exists at `where.audio_path` and writes
/// the CQT evidence image to `where.image_path`.
Sample build_sample(const signal::Waveform& wave, Label label, const SampleLocation& where,
                    const features::FeatureConfig& features, const RenderConfig& render,
                    Split split = Split::Train, std::string domain = {},
                    features::RepKind kind = features::RepKind::Cqt);

/// Renders the evidence image of every sample into manifest_dir/image_subdir
/// (one PPM per audio file, same stem) and sets image_path relative to
/// manifest_dir. Audio paths resolve against manifest_dir.
void attach_evidence_images(Manifest& samples, const std::filesystem::path& manifest_dir,
                            const std::filesystem::path& image_subdir, const features::FeatureConfig& features,
                            const RenderConfig& render, features::RepKind kind = features::RepKind::Cqt);

}  // namespace tfev::evidence
