// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfev/evidence/manifest.hpp"

namespace tfev::model {

// Byte-level vocabulary: ids 0..255 are raw bytes, then the special tokens.
inline constexpr int kBos = 256;
inline constexpr int kEos = 257;
inline constexpr int kReal = 258;
inline constexpr int kFake = 259;
inline constexpr int kImg = 260;
inline constexpr int kVocabSize = 261;

std::vector<int> tokenize_text(std::string_view text);

/// Inverse of tokenize_text on plain text. Special tokens render as <BOS>, <REAL>, etc.
std::string detokenize(std::span<const int> ids);

int label_token(evidence::Label label);

}  // namespace tfev::model
