// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/params.hpp"

#include <cmath>

#include "tfev/error.hpp"
#include "tfev/random.hpp"

namespace tfev::model {

void ModelConfig::validate() const {
  if (d_model == 0 || n_layers == 0 || n_heads == 0 || ff_mult == 0) {
    throw DataError("model: d_model, n_layers, n_heads and ff_mult must be positive");
  }
  if (d_model % n_heads != 0) {
    throw DataError("model: d_model " + std::to_string(d_model) + " is not divisible by n_heads " +
                    std::to_string(n_heads));
  }
  if (vocab < kVocabSize) throw DataError("model: vocab must hold at least " + std::to_string(kVocabSize) + " tokens");
  if (patch == 0 || image_width % patch != 0 || image_height % patch != 0) {
    throw DataError("model: patch " + std::to_string(patch) + " must divide image size " +
                    std::to_string(image_width) + "x" + std::to_string(image_height));
  }
  if (n_mels < 2 || token_stride == 0 || mel_hop == 0 || mel_window == 0 || mel_window > n_fft) {
    throw DataError("model: invalid audio frontend parameters");
  }
  if (!(mel_floor_db < 0.0)) throw DataError("model: mel_floor_db must be negative");
  if (max_seq == 0) throw DataError("model: max_seq must be positive");
  if (lora_rank > 0 && !(lora_alpha > 0.0)) throw DataError("model: lora_alpha must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"d_model", c.d_model},       {"n_layers", c.n_layers},         {"n_heads", c.n_heads},
       {"ff_mult", c.ff_mult},       {"vocab", c.vocab},               {"n_mels", c.n_mels},
       {"mel_window", c.mel_window}, {"mel_hop", c.mel_hop},           {"n_fft", c.n_fft},
       {"token_stride", c.token_stride}, {"mel_floor_db", c.mel_floor_db}, {"patch", c.patch},
       {"image_width", c.image_width},   {"image_height", c.image_height}, {"max_seq", c.max_seq},
       {"lora_rank", c.lora_rank},   {"lora_alpha", c.lora_alpha},     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.d_model = j.value("d_model", c.d_model);
  c.n_layers = j.value("n_layers", c.n_layers);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.ff_mult = j.value("ff_mult", c.ff_mult);
  c.vocab = j.value("vocab", c.vocab);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.mel_window = j.value("mel_window", c.mel_window);
  c.mel_hop = j.value("mel_hop", c.mel_hop);
  c.n_fft = j.value("n_fft", c.n_fft);
  c.token_stride = j.value("token_stride", c.token_stride);
  c.mel_floor_db = j.value("mel_floor_db", c.mel_floor_db);
  c.patch = j.value("patch", c.patch);
  c.image_width = j.value("image_width", c.image_width);
  c.image_height = j.value("image_height", c.image_height);
  c.max_seq = j.value("max_seq", c.max_seq);
  c.lora_rank = j.value("lora_rank", c.lora_rank);
  c.lora_alpha = j.value("lora_alpha", c.lora_alpha);
  c.seed = j.value("seed", c.seed);
}

namespace {

Mat gaussian(Eigen::Index rows, Eigen::Index cols, double sd, Rng& rng) {
  Mat m(rows, cols);
  // Fill row by row so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, sd);
  }
  return m;
}

Linear make_linear(std::size_t d_in, std::size_t d_out, std::size_t rank, Rng& rng, double sd = -1.0) {
  const auto in = static_cast<Eigen::Index>(d_in);
  const auto out = static_cast<Eigen::Index>(d_out);
  Linear lin;
  lin.W = gaussian(in, out, sd > 0.0 ? sd : 1.0 / std::sqrt(static_cast<double>(d_in)), rng);
  lin.b = Mat::Zero(1, out);
  if (rank > 0) {
    lin.A = gaussian(static_cast<Eigen::Index>(rank), in, 1.0 / std::sqrt(static_cast<double>(d_in)), rng);
    lin.B = Mat::Zero(out, static_cast<Eigen::Index>(rank));
  }
  return lin;
}

LayerNormParams make_norm(std::size_t d) {
  return {Mat::Ones(1, static_cast<Eigen::Index>(d)), Mat::Zero(1, static_cast<Eigen::Index>(d))};
}

}  // namespace

Params init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(mix_seed(config.seed, 0x6D6F64656CULL));
  const auto d = static_cast<Eigen::Index>(config.d_model);
  Params p;
  p.config = config;
  p.tok_emb = gaussian(static_cast<Eigen::Index>(config.vocab), d, 0.1, rng);
  p.pos_emb = gaussian(static_cast<Eigen::Index>(config.max_seq), d, 0.02, rng);
  p.audio_proj = make_linear(config.n_mels, config.d_model, 0, rng);
  p.audio_aligner = make_linear(config.d_model, config.d_model, 0, rng);
  p.patch_embed = make_linear(config.patch_dim(), config.d_model, 0, rng);
  p.vis_row_pos = gaussian(static_cast<Eigen::Index>(config.grid_h()), d, 0.02, rng);
  p.vis_col_pos = gaussian(static_cast<Eigen::Index>(config.grid_w()), d, 0.02, rng);
  p.vis_aligner = make_linear(config.d_model, config.d_model, 0, rng);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    BlockParams b;
    b.ln1 = make_norm(config.d_model);
    b.q = make_linear(config.d_model, config.d_model, config.lora_rank, rng);
    b.k = make_linear(config.d_model, config.d_model, config.lora_rank, rng);
    b.v = make_linear(config.d_model, config.d_model, config.lora_rank, rng);
    b.o = make_linear(config.d_model, config.d_model, config.lora_rank, rng);
    b.ln2 = make_norm(config.d_model);
    b.up = make_linear(config.d_model, config.ff_dim(), config.lora_rank, rng);
    b.down = make_linear(config.ff_dim(), config.d_model, config.lora_rank, rng);
    p.blocks.push_back(std::move(b));
  }
  p.ln_f = make_norm(config.d_model);
  p.lm_head = make_linear(config.d_model, config.vocab, 0, rng, 0.02);
  return p;
}

Params zeros_like(const Params& p) {
  Params z = p;
  for_each_tensor(z, [](const std::string&, Mat& m, TensorInfo) { m.setZero(); });
  return z;
}

std::size_t parameter_count(const Params& p, bool trainable_only) {
  std::size_t n = 0;
  for_each_tensor(p, [&](const std::string&, const Mat& m, TensorInfo info) {
    if (!trainable_only || info.trainable) n += static_cast<std::size_t>(m.size());
  });
  return n;
}

Mat linear_forward(const Linear& lin, const Mat& x, double lora_scale) {
  Mat y = x * lin.W;
  y.rowwise() += lin.b.row(0);
  if (lin.has_lora()) y.noalias() += lora_scale * ((x * lin.A.transpose()) * lin.B.transpose());
  return y;
}

Mat effective_weight(const Linear& lin, double lora_scale) {
  if (!lin.has_lora()) return lin.W;
  if (lin.A.cols() != lin.W.rows() || lin.B.rows() != lin.W.cols() || lin.A.rows() != lin.B.cols()) {
    throw DataError("lora: adapter shapes A " + std::to_string(lin.A.rows()) + "x" + std::to_string(lin.A.cols()) +
                    ", B " + std::to_string(lin.B.rows()) + "x" + std::to_string(lin.B.cols()) +
                    " do not match weight " + std::to_string(lin.W.rows()) + "x" + std::to_string(lin.W.cols()));
  }
  return lin.W + lora_scale * (lin.B * lin.A).transpose();
}

Params lora_merge(const Params& p) {
  Params out = p;
  const double s = p.config.lora_scale();
  for (auto& b : out.blocks) {
    for (Linear* lin : {&b.q, &b.k, &b.v, &b.o, &b.up, &b.down}) {
      lin->W = effective_weight(*lin, s);
      lin->A.resize(0, 0);
      lin->B.resize(0, 0);
    }
  }
  return out;
}

std::size_t lora_parameter_count(const Params& p) {
  std::size_t n = 0;
  for (const auto& b : p.blocks) {
    for (const Linear* lin : {&b.q, &b.k, &b.v, &b.o, &b.up, &b.down}) {
      if (lin->has_lora()) n += static_cast<std::size_t>(lin->A.size() + lin->B.size());
    }
  }
  return n;
}

}  // namespace tfev::model
