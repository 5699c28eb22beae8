// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tfev/model/tokenizer.hpp"

namespace tfev::model {

using Mat = Eigen::MatrixXd;

struct ModelConfig {
  std::size_t d_model = 64;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t ff_mult = 4;
  std::size_t vocab = kVocabSize;
  // Audio frontend: log-mel frames pooled over token_stride frames per token.
  std::size_t n_mels = 40;
  std::size_t mel_window = 400;
  std::size_t mel_hop = 160;
  std::size_t n_fft = 512;
  std::size_t token_stride = 4;
  double mel_floor_db = -100.0;
  // Visual frontend.
  std::size_t patch = 16;
  std::size_t image_width = 224;
  std::size_t image_height = 224;
  std::size_t max_seq = 768;
  std::size_t lora_rank = 4;
  double lora_alpha = 8.0;
  std::uint64_t seed = 0;

  std::size_t head_dim() const { return d_model / n_heads; }
  std::size_t ff_dim() const { return ff_mult * d_model; }
  std::size_t grid_w() const { return image_width / patch; }
  std::size_t grid_h() const { return image_height / patch; }
  std::size_t n_visual_tokens() const { return grid_w() * grid_h(); }
  std::size_t patch_dim() const { return 3 * patch * patch; }
  double lora_scale() const { return lora_rank == 0 ? 0.0 : lora_alpha / static_cast<double>(lora_rank); }

  /// d divisible by n_heads, patch divides both image sides, positive sizes.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// y = x W + b, with an optional low-rank adapter adding scale * (x A^T) B^T.
/// W is d_in x d_out, b is 1 x d_out, A is r x d_in, B is d_out x r.
struct Linear {
  Mat W, b, A, B;
  bool has_lora() const { return A.size() > 0; }
  std::size_t d_in() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t d_out() const { return static_cast<std::size_t>(W.cols()); }
};

struct LayerNormParams {
  Mat gamma, beta;  // 1 x d
};

struct BlockParams {
  LayerNormParams ln1;
  Linear q, k, v, o;
  LayerNormParams ln2;
  Linear up, down;
};

struct Params {
  ModelConfig config;
  Mat tok_emb;  // vocab x d
  Mat pos_emb;  // max_seq x d
  Linear audio_proj;     // n_mels -> d, trainable (stand-in audio encoder)
  Linear audio_aligner;  // d -> d, frozen
  Linear patch_embed;    // 3 p^2 -> d, frozen (stand-in vision encoder)
  Mat vis_row_pos;       // grid_h x d, frozen
  Mat vis_col_pos;       // grid_w x d, frozen
  Linear vis_aligner;    // d -> d, frozen
  std::vector<BlockParams> blocks;
  LayerNormParams ln_f;
  Linear lm_head;  // d -> vocab
};

struct TensorInfo {
  bool trainable = false;
  bool decay = false;  // decoupled weight decay applies
};

/// Visits every tensor with a stable name, in a fixed order. Empty tensors
/// (absent LoRA factors) are skipped.
template <class P, class F>
void for_each_tensor(P& p, F&& f) {
  const auto visit = [&](const std::string& name, auto& m, TensorInfo info) {
    if (m.size() > 0) f(name, m, info);
  };
  const TensorInfo frozen{false, false};
  const TensorInfo matrix{true, true};
  const TensorInfo vector{true, false};
  const auto linear = [&](const std::string& name, auto& lin, TensorInfo w, TensorInfo b) {
    visit(name + ".W", lin.W, w);
    visit(name + ".b", lin.b, b);
    visit(name + ".lora_A", lin.A, vector);
    visit(name + ".lora_B", lin.B, vector);
  };
  const auto norm = [&](const std::string& name, auto& ln) {
    visit(name + ".gamma", ln.gamma, vector);
    visit(name + ".beta", ln.beta, vector);
  };
  visit("tok_emb", p.tok_emb, matrix);
  visit("pos_emb", p.pos_emb, matrix);
  linear("audio_proj", p.audio_proj, matrix, vector);
  linear("audio_aligner", p.audio_aligner, frozen, frozen);
  linear("patch_embed", p.patch_embed, frozen, frozen);
  visit("vis_row_pos", p.vis_row_pos, frozen);
  visit("vis_col_pos", p.vis_col_pos, frozen);
  linear("vis_aligner", p.vis_aligner, frozen, frozen);
  for (std::size_t l = 0; l < p.blocks.size(); ++l) {
    auto& b = p.blocks[l];
    const std::string pre = "blocks." + std::to_string(l) + ".";
    // Under LoRA the base projections stay frozen; without adapters they train.
    const bool base_trains = !b.q.has_lora();
    const TensorInfo bw = base_trains ? matrix : frozen;
    const TensorInfo bb = base_trains ? vector : frozen;
    norm(pre + "ln1", b.ln1);
    linear(pre + "attn.q", b.q, bw, bb);
    linear(pre + "attn.k", b.k, bw, bb);
    linear(pre + "attn.v", b.v, bw, bb);
    linear(pre + "attn.o", b.o, bw, bb);
    norm(pre + "ln2", b.ln2);
    linear(pre + "mlp.up", b.up, bw, bb);
    linear(pre + "mlp.down", b.down, bw, bb);
  }
  norm("ln_f", p.ln_f);
  linear("lm_head", p.lm_head, matrix, vector);
}

/// Random initialization from config.seed. LoRA B starts at zero.
Params init_params(const ModelConfig& config);

/// Same structure, every tensor zero. Used for gradient accumulation.
Params zeros_like(const Params& p);

std::size_t parameter_count(const Params& p, bool trainable_only);

/// Forward of one linear layer with its adapter (if any).
Mat linear_forward(const Linear& lin, const Mat& x, double lora_scale);

/// W + scale * (B A)^T. Throws DataError if the adapter shape does not match W.
Mat effective_weight(const Linear& lin, double lora_scale);

/// Folds every adapter into its base weight and removes it.
Params lora_merge(const Params& p);

/// r * (d_in + d_out) summed over all adapters.
std::size_t lora_parameter_count(const Params& p);

}  // namespace tfev::model
