// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tfev::evidence {

enum class Label { Real, Fake };
enum class Split { Train, Dev, Eval };

std::string_view to_string(Label label);
std::string_view to_string(Split split);
/// Exactly "real" or "fake"; throws DataError("invalid label ...") otherwise.
Label parse_label(std::string_view text);
Split parse_split(std::string_view text);

/// One (audio, evidence image, label) record of a dataset.
struct Sample {
  std::string audio_path;
  std::string image_path;
  Label label = Label::Real;
  Split split = Split::Train;
  std::string domain;

  friend bool operator==(const Sample&, const Sample&) = default;
};

using Manifest = std::vector<Sample>;

// JSON lines: {"audio_path":..., "image_path":..., "label":..., "split":..., "domain":...}
// Unknown keys are ignored on read; errors carry the 1-based line number.
Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& samples, std::ostream& out);
void write_manifest(const Manifest& samples, const std::filesystem::path& path);

Manifest filter_split(const Manifest& samples, Split split);

/// Resolves a manifest path relative to the manifest's own directory when not absolute.
std::filesystem::path resolve_path(const std::filesystem::path& manifest_dir, const std::string& path);

}  // namespace tfev::evidence
