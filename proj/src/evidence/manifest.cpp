// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/evidence/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "tfev/error.hpp"

namespace tfev::evidence {

std::string_view to_string(Label label) { return label == Label::Real ? "real" : "fake"; }

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Eval: return "eval";
  }
  return "train";
}

Label parse_label(std::string_view text) {
  if (text == "real") return Label::Real;
  if (text == "fake") return Label::Fake;
  throw DataError("invalid label '" + std::string(text) + "' (expected real or fake)");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "dev") return Split::Dev;
  if (text == "eval") return Split::Eval;
  throw DataError("invalid split '" + std::string(text) + "' (expected train, dev or eval)");
}

Manifest read_manifest(std::istream& in) {
  Manifest out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = " at line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("manifest: malformed JSON" + where + ": " + e.what());
    }
    if (!j.is_object()) throw DataError("manifest: expected a JSON object" + where);
    auto field = [&](const char* key) -> std::string {
      if (!j.contains(key)) throw DataError(std::string("manifest: missing required key '") + key + "'" + where);
      if (!j[key].is_string()) throw DataError(std::string("manifest: key '") + key + "' must be a string" + where);
      return j[key].get<std::string>();
    };
    Sample s;
    s.audio_path = field("audio_path");
    s.image_path = field("image_path");
    try {
      s.label = parse_label(field("label"));
      s.split = parse_split(field("split"));
    } catch (const DataError& e) {
      throw DataError(std::string("manifest: ") + e.what() + where);
    }
    s.domain = field("domain");
    out.push_back(std::move(s));
  }
  return out;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest: cannot open " + path.string());
  try {
    return read_manifest(in);
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " [" + path.string() + "]");
  }
}

void write_manifest(const Manifest& samples, std::ostream& out) {
  for (const auto& s : samples) {
    // ordered_json keeps the documented key order in the file.
    nlohmann::ordered_json j;
    j["audio_path"] = s.audio_path;
    j["image_path"] = s.image_path;
    j["label"] = to_string(s.label);
    j["split"] = to_string(s.split);
    j["domain"] = s.domain;
    out << j.dump() << '\n';
  }
}

void write_manifest(const Manifest& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("manifest: cannot write " + path.string());
  write_manifest(samples, out);
  if (!out) throw IoError("manifest: short write to " + path.string());
}

Manifest filter_split(const Manifest& samples, Split split) {
  Manifest out;
  for (const auto& s : samples) {
    if (s.split == split) out.push_back(s);
  }
  return out;
}

std::filesystem::path resolve_path(const std::filesystem::path& manifest_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || manifest_dir.empty()) return p;
  return manifest_dir / p;
}

}  // namespace tfev::evidence
