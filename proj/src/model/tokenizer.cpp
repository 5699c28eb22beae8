// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/tokenizer.hpp"

#include "tfev/error.hpp"

namespace tfev::model {

std::vector<int> tokenize_text(std::string_view text) {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(static_cast<unsigned char>(c));
  return ids;
}

std::string detokenize(std::span<const int> ids) {
  std::string out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id >= 0 && id < 256) {
      out.push_back(static_cast<char>(id));
      continue;
    }
    switch (id) {
      case kBos: out += "<BOS>"; break;
      case kEos: out += "<EOS>"; break;
      case kReal: out += "<REAL>"; break;
      case kFake: out += "<FAKE>"; break;
      case kImg: out += "<IMG>"; break;
      default: throw DataError("detokenize: id " + std::to_string(id) + " outside the vocabulary");
    }
  }
  return out;
}

int label_token(evidence::Label label) { return label == evidence::Label::Fake ? kFake : kReal; }

}  // namespace tfev::model
