// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tfev/evidence/manifest.hpp"
#include "tfev/model/attention.hpp"
#include "tfev/model/params.hpp"
#include "tfev/model/sequence.hpp"

namespace tfev::model {

/// Input embeddings (L x d): token or modality embedding plus learned position.
Mat embed_sequence(const TokenSequence& seq, const Params& params);

struct ForwardResult {
  Mat logits;  // L x V
  AttentionRecord attention;
};

/// Pre-norm causal transformer over the whole sequence. Throws DataError if
/// the sequence is empty or longer than max_seq.
ForwardResult forward(const TokenSequence& seq, const Params& params, bool record_attention = false);

/// Mean negative log-likelihood of the answer tokens. answer_positions are
/// sequence positions of the answer tokens; the token at position i is scored
/// by the logits row i - 1. Throws DataError on an empty or invalid span.
double sft_loss(const Mat& logits, std::span<const int> answer_ids, std::span<const std::size_t> answer_positions);

/// sft_loss of a sequence carrying an answer segment.
double sequence_loss(const TokenSequence& seq, const Params& params);

/// Loss plus its gradient, accumulated (added) into `grads` for trainable tensors.
double sequence_loss_and_grad(const TokenSequence& seq, const Params& params, Params& grads);

struct Score {
  double p_real = 0.5;
  double p_fake = 0.5;
  evidence::Label label = evidence::Label::Fake;
};

/// Two-way softmax over the REAL and FAKE logits at the last prompt position.
/// Label is fake iff p_fake >= 0.5.
Score score_from_logits(double real_logit, double fake_logit);
Score predict_score(const TokenSequence& seq, const Params& params);

}  // namespace tfev::model
