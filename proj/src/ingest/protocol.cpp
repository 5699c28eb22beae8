// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/ingest/protocol.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "tfev/error.hpp"

namespace tfev::ingest {

ProtocolRecord parse_protocol_line(std::string_view line, std::size_t line_no) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> fields;
  for (std::string f; in >> f;) fields.push_back(f);
  if (fields.size() != 5) {
    throw DataError("protocol: expected 5 fields at line " + std::to_string(line_no) + ", found " +
                    std::to_string(fields.size()));
  }
  ProtocolRecord r;
  r.speaker_id = fields[0];
  r.utterance_id = fields[1];
  r.unused = fields[2];
  r.system_id = fields[3];
  if (fields[4] == "bonafide") {
    r.label = evidence::Label::Real;
  } else if (fields[4] == "spoof") {
    r.label = evidence::Label::Fake;
  } else {
    throw DataError("protocol: unknown key '" + fields[4] + "' at line " + std::to_string(line_no) +
                    " (expected bonafide or spoof)");
  }
  return r;
}

evidence::Manifest parse_protocol(std::istream& in, const ProtocolOptions& options) {
  evidence::Manifest out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto rec = parse_protocol_line(line, line_no);
    std::filesystem::path audio;
    for (const char* ext : {".flac", ".wav"}) {
      auto candidate = options.audio_root / (rec.utterance_id + ext);
      if (std::filesystem::exists(candidate)) {
        audio = candidate;
        break;
      }
    }
    if (audio.empty()) {
      if (!options.allow_missing_audio) {
        throw DataError("protocol: no .flac or .wav for utterance '" + rec.utterance_id + "' under " +
                        options.audio_root.string() + " (line " + std::to_string(line_no) + ")");
      }
      audio = options.audio_root / (rec.utterance_id + ".wav");
    }
    evidence::Sample s;
    s.audio_path = audio.string();
    s.label = rec.label;
    s.split = options.split;
    s.domain = options.domain;
    out.push_back(std::move(s));
  }
  return out;
}

evidence::Manifest parse_protocol(const std::filesystem::path& path, const ProtocolOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("protocol: cannot open " + path.string());
  return parse_protocol(in, options);
}

}  // namespace tfev::ingest
