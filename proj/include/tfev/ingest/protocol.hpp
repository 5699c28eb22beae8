// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "tfev/evidence/manifest.hpp"

namespace tfev::ingest {

/// One line of an ASVspoof-style countermeasure protocol:
/// "<speaker> <utterance> <unused> <system|-> <bonafide|spoof>".
struct ProtocolRecord {
  std::string speaker_id;
  std::string utterance_id;
  std::string unused;  // third column, kept verbatim
  std::string system_id;
  evidence::Label label = evidence::Label::Real;
};

/// Throws DataError "expected 5 fields at line N" / "unknown key ... at line N".
ProtocolRecord parse_protocol_line(std::string_view line, std::size_t line_no);

struct ProtocolOptions {
  std::filesystem::path audio_root;
  evidence::Split split = evidence::Split::Train;
  std::string domain;
  /// When false, records whose audio is missing become an error.
  bool allow_missing_audio = false;
};

/// One Sample per non-blank line; audio_path is audio_root/<utt>.flac or .wav,
/// whichever exists first. image_path is left empty for build-manifest to fill.
evidence::Manifest parse_protocol(std::istream& in, const ProtocolOptions& options);
evidence::Manifest parse_protocol(const std::filesystem::path& path, const ProtocolOptions& options);

}  // namespace tfev::ingest
