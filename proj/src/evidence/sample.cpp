// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/evidence/sample.hpp"

#include "tfev/error.hpp"
#include "tfev/signal/wav.hpp"

namespace tfev::evidence {

EvidenceImage evidence_image(const signal::Waveform& wave, features::RepKind kind,
                             const features::FeatureConfig& features, const RenderConfig& render) {
  return render_evidence(features::compute_representation(wave, kind, features), render);
}

Sample build_sample(const signal::Waveform& wave, Label label, const SampleLocation& where,
                    const features::FeatureConfig& features, const RenderConfig& render, Split split,
                    std::string domain, features::RepKind kind) {
  if (!std::filesystem::exists(where.audio_path)) signal::write_wav(wave, where.audio_path);
  // Render from the stored (PCM16-quantized) audio so the image is a pure function of the file on disk.
  const auto stored = signal::load_wav(where.audio_path);
  const auto image = evidence_image(stored, kind, features, render);
  encode_image_file(image, where.image_path, ImageFormat::Ppm);
  Sample s;
  s.audio_path = where.audio_path.string();
  s.image_path = where.image_path.string();
  s.label = label;
  s.split = split;
  s.domain = std::move(domain);
  return s;
}

void attach_evidence_images(Manifest& samples, const std::filesystem::path& manifest_dir,
                            const std::filesystem::path& image_subdir, const features::FeatureConfig& features,
                            const RenderConfig& render, features::RepKind kind) {
  std::filesystem::create_directories(manifest_dir / image_subdir);
  for (auto& s : samples) {
    const auto audio = resolve_path(manifest_dir, s.audio_path);
    if (!std::filesystem::exists(audio)) throw IoError("evidence: audio file '" + audio.string() + "' not found");
    const auto rel = image_subdir / std::filesystem::path(s.audio_path).filename().replace_extension(".ppm");
    const auto image = evidence_image(signal::load_wav(audio), kind, features, render);
    encode_image_file(image, manifest_dir / rel, ImageFormat::Ppm);
    s.image_path = rel.generic_string();
  }
}

}  // namespace tfev::evidence
