// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/model/transformer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tfev/error.hpp"

namespace tfev::model {
namespace {

using Vec = Eigen::VectorXd;
constexpr double kLnEps = 1e-5;

struct LinearTape {
  Mat x;
  Mat xa;  // x A^T, present with an adapter
};

struct NormTape {
  Mat xhat;
  Vec rstd;
};

struct BlockTape {
  NormTape ln1, ln2;
  LinearTape q, k, v, o, up, down;
  Mat Q, K, V;
  std::vector<Mat> probs;  // per head
  Mat pre_act;
};

struct Tape {
  Mat audio_features;
  std::vector<BlockTape> blocks;
  NormTape ln_f;
  Mat hidden;  // ln_f output, L x d
};

Mat linear_fwd(const Linear& lin, const Mat& x, double s, LinearTape* tape) {
  Mat y = x * lin.W;
  y.rowwise() += lin.b.row(0);
  if (lin.has_lora()) {
    Mat xa = x * lin.A.transpose();
    y.noalias() += s * (xa * lin.B.transpose());
    if (tape) tape->xa = std::move(xa);
  }
  if (tape) tape->x = x;
  return y;
}

Mat linear_bwd(const Linear& lin, const LinearTape& t, const Mat& dy, double s, Linear* g, bool base_trainable) {
  Mat dx = dy * lin.W.transpose();
  if (g && base_trainable) {
    g->W.noalias() += t.x.transpose() * dy;
    g->b += dy.colwise().sum();
  }
  if (lin.has_lora()) {
    const Mat dxa = s * (dy * lin.B);
    if (g) {
      g->B.noalias() += s * (dy.transpose() * t.xa);
      g->A.noalias() += dxa.transpose() * t.x;
    }
    dx.noalias() += dxa * lin.A;
  }
  return dx;
}

Mat norm_fwd(const LayerNormParams& p, const Mat& x, NormTape* tape) {
  const Vec mean = x.rowwise().mean();
  const Mat xc = x.colwise() - mean;
  const Vec var = xc.array().square().rowwise().mean();
  const Vec rstd = (var.array() + kLnEps).rsqrt();
  Mat xhat = xc.array().colwise() * rstd.array();
  Mat y = (xhat.array().rowwise() * p.gamma.row(0).array()).rowwise() + p.beta.row(0).array();
  if (tape) {
    tape->xhat = std::move(xhat);
    tape->rstd = rstd;
  }
  return y;
}

Mat norm_bwd(const LayerNormParams& p, const NormTape& t, const Mat& dy, LayerNormParams* g) {
  if (g) {
    g->gamma += (dy.array() * t.xhat.array()).colwise().sum().matrix();
    g->beta += dy.colwise().sum();
  }
  const Mat dxhat = dy.array().rowwise() * p.gamma.row(0).array();
  const Vec m1 = dxhat.rowwise().mean();
  const Vec m2 = (dxhat.array() * t.xhat.array()).rowwise().mean();
  Mat dx = (dxhat.colwise() - m1).array() - t.xhat.array().colwise() * m2.array();
  return dx.array().colwise() * t.rstd.array();
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

// Causal softmax of scores in place: row i keeps columns 0..i, the rest are exactly 0.
void causal_softmax(Mat& s) {
  const Eigen::Index n = s.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j <= i; ++j) m = std::max(m, s(i, j));
    double sum = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) {
      s(i, j) = std::exp(s(i, j) - m);
      sum += s(i, j);
    }
    const double inv = 1.0 / sum;
    for (Eigen::Index j = 0; j <= i; ++j) s(i, j) *= inv;
    for (Eigen::Index j = i + 1; j < n; ++j) s(i, j) = 0.0;
  }
}

void check_length(const TokenSequence& seq, const Params& params) {
  if (seq.length() == 0) throw DataError("forward: empty sequence");
  if (seq.length() > params.config.max_seq) {
    throw DataError("forward: sequence length " + std::to_string(seq.length()) + " exceeds max_seq " +
                    std::to_string(params.config.max_seq));
  }
}

Mat embed(const TokenSequence& seq, const Params& params, Tape* tape) {
  check_length(seq, params);
  const auto L = static_cast<Eigen::Index>(seq.length());
  const auto d = static_cast<Eigen::Index>(params.config.d_model);
  Mat x(L, d);
  for (Eigen::Index i = 0; i < L; ++i) {
    const int id = seq.ids[static_cast<std::size_t>(i)];
    if (id >= 0) {
      if (id >= params.tok_emb.rows()) throw DataError("forward: token id " + std::to_string(id) + " out of range");
      x.row(i) = params.tok_emb.row(id);
    }
  }
  if (const auto* aud = seq.find(Role::Aud)) {
    if (seq.audio_features.rows() != static_cast<Eigen::Index>(aud->size())) {
      throw DataError("forward: audio span does not match the audio features");
    }
    const Mat tokens = encode_audio_tokens(seq.audio_features, params);
    x.middleRows(static_cast<Eigen::Index>(aud->begin), tokens.rows()) = tokens;
    if (tape) tape->audio_features = seq.audio_features;
  }
  if (const auto* vis = seq.find(Role::Vis)) {
    if (seq.visual_tokens.rows() != static_cast<Eigen::Index>(vis->size()) || seq.visual_tokens.cols() != d) {
      throw DataError("forward: visual span does not match the visual tokens");
    }
    x.middleRows(static_cast<Eigen::Index>(vis->begin), seq.visual_tokens.rows()) = seq.visual_tokens;
  }
  x += params.pos_emb.topRows(L);
  return x;
}

// Runs every block and the final norm. Returns the normalized hidden states.
Mat run(const TokenSequence& seq, const Params& params, Tape* tape, AttentionRecord* record) {
  const auto& c = params.config;
  const double s = c.lora_scale();
  const auto H = static_cast<Eigen::Index>(c.n_heads);
  const auto dh = static_cast<Eigen::Index>(c.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat x = embed(seq, params, tape);
  const Eigen::Index L = x.rows();
  if (tape) tape->blocks.resize(params.blocks.size());
  if (record) {
    record->n_layers = params.blocks.size();
    record->n_heads = c.n_heads;
    record->maps.clear();
  }
  for (std::size_t l = 0; l < params.blocks.size(); ++l) {
    const auto& b = params.blocks[l];
    BlockTape* t = tape ? &tape->blocks[l] : nullptr;
    const Mat h1 = norm_fwd(b.ln1, x, t ? &t->ln1 : nullptr);
    Mat Q = linear_fwd(b.q, h1, s, t ? &t->q : nullptr);
    Mat K = linear_fwd(b.k, h1, s, t ? &t->k : nullptr);
    Mat V = linear_fwd(b.v, h1, s, t ? &t->v : nullptr);
    Mat ctx(L, static_cast<Eigen::Index>(c.d_model));
    if (t) t->probs.resize(static_cast<std::size_t>(H));
    for (Eigen::Index h = 0; h < H; ++h) {
      Mat P = scale * (Q.middleCols(h * dh, dh) * K.middleCols(h * dh, dh).transpose());
      causal_softmax(P);
      ctx.middleCols(h * dh, dh).noalias() = P * V.middleCols(h * dh, dh);
      if (record) record->maps.push_back(P);
      if (t) t->probs[static_cast<std::size_t>(h)] = std::move(P);
    }
    x += linear_fwd(b.o, ctx, s, t ? &t->o : nullptr);
    const Mat h2 = norm_fwd(b.ln2, x, t ? &t->ln2 : nullptr);
    Mat u = linear_fwd(b.up, h2, s, t ? &t->up : nullptr);
    const Mat g = u.unaryExpr([](double v) { return gelu(v); });
    x += linear_fwd(b.down, g, s, t ? &t->down : nullptr);
    if (t) {
      t->Q = std::move(Q);
      t->K = std::move(K);
      t->V = std::move(V);
      t->pre_act = std::move(u);
    }
  }
  Mat hidden = norm_fwd(params.ln_f, x, tape ? &tape->ln_f : nullptr);
  if (tape) tape->hidden = hidden;
  return hidden;
}

Mat head_logits(const Params& params, const Mat& hidden_rows) {
  return linear_fwd(params.lm_head, hidden_rows, 0.0, nullptr);
}

struct AnswerSpan {
  std::vector<int> ids;
  std::vector<std::size_t> positions;
};

AnswerSpan answer_span(const TokenSequence& seq) {
  const auto* a = seq.find(Role::Answer);
  if (!a || a->size() == 0) throw DataError("loss: sequence has no answer span");
  AnswerSpan out;
  for (std::size_t i = a->begin; i < a->end; ++i) {
    out.ids.push_back(seq.ids[i]);
    out.positions.push_back(i);
  }
  return out;
}

void check_answers(std::size_t rows, std::span<const int> ids, std::span<const std::size_t> positions, std::size_t vocab) {
  if (ids.empty()) throw DataError("loss: empty answer span");
  if (ids.size() != positions.size()) throw DataError("loss: answer ids and positions differ in length");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (positions[i] == 0 || positions[i] > rows) {
      throw DataError("loss: answer position " + std::to_string(positions[i]) + " outside the sequence");
    }
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) throw DataError("loss: answer id out of range");
  }
}

// Loss and d(loss)/d(logits) for rows already gathered at positions - 1.
double loss_rows(const Mat& z, std::span<const int> ids, Mat* dz) {
  double total = 0.0;
  const double n = static_cast<double>(ids.size());
  if (dz) dz->resize(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = m + std::log((z.row(r).array() - m).exp().sum());
    total += lse - z(r, ids[static_cast<std::size_t>(r)]);
    if (dz) {
      dz->row(r) = ((z.row(r).array() - lse).exp() / n).matrix();
      (*dz)(r, ids[static_cast<std::size_t>(r)]) -= 1.0 / n;
    }
  }
  return total / n;
}

}  // namespace

Mat embed_sequence(const TokenSequence& seq, const Params& params) { return embed(seq, params, nullptr); }

ForwardResult forward(const TokenSequence& seq, const Params& params, bool record_attention) {
  ForwardResult out;
  const Mat hidden = run(seq, params, nullptr, record_attention ? &out.attention : nullptr);
  out.logits = head_logits(params, hidden);
  return out;
}

double sft_loss(const Mat& logits, std::span<const int> answer_ids, std::span<const std::size_t> answer_positions) {
  check_answers(static_cast<std::size_t>(logits.rows()), answer_ids, answer_positions,
                static_cast<std::size_t>(logits.cols()));
  Mat z(static_cast<Eigen::Index>(answer_ids.size()), logits.cols());
  for (std::size_t i = 0; i < answer_positions.size(); ++i) {
    z.row(static_cast<Eigen::Index>(i)) = logits.row(static_cast<Eigen::Index>(answer_positions[i] - 1));
  }
  return loss_rows(z, answer_ids, nullptr);
}

double sequence_loss(const TokenSequence& seq, const Params& params) {
  const auto span = answer_span(seq);
  check_answers(seq.length(), span.ids, span.positions, params.config.vocab);
  const Mat hidden = run(seq, params, nullptr, nullptr);
  Mat rows(static_cast<Eigen::Index>(span.positions.size()), hidden.cols());
  for (std::size_t i = 0; i < span.positions.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = hidden.row(static_cast<Eigen::Index>(span.positions[i] - 1));
  }
  return loss_rows(head_logits(params, rows), span.ids, nullptr);
}

double sequence_loss_and_grad(const TokenSequence& seq, const Params& params, Params& grads) {
  const auto& c = params.config;
  const double s = c.lora_scale();
  const auto span = answer_span(seq);
  check_answers(seq.length(), span.ids, span.positions, c.vocab);

  Tape tape;
  run(seq, params, &tape, nullptr);
  const Eigen::Index L = tape.hidden.rows();
  const auto d = static_cast<Eigen::Index>(c.d_model);

  // Head and loss, on the scored rows only.
  const auto n_ans = static_cast<Eigen::Index>(span.positions.size());
  Mat rows(n_ans, d);
  for (Eigen::Index i = 0; i < n_ans; ++i) {
    rows.row(i) = tape.hidden.row(static_cast<Eigen::Index>(span.positions[static_cast<std::size_t>(i)] - 1));
  }
  Mat dz;
  const double loss = loss_rows(head_logits(params, rows), span.ids, &dz);
  grads.lm_head.W.noalias() += rows.transpose() * dz;
  grads.lm_head.b += dz.colwise().sum();
  Mat dhidden = Mat::Zero(L, d);
  const Mat drows = dz * params.lm_head.W.transpose();
  for (Eigen::Index i = 0; i < n_ans; ++i) {
    dhidden.row(static_cast<Eigen::Index>(span.positions[static_cast<std::size_t>(i)] - 1)) += drows.row(i);
  }
  Mat dx = norm_bwd(params.ln_f, tape.ln_f, dhidden, &grads.ln_f);

  const auto H = static_cast<Eigen::Index>(c.n_heads);
  const auto dh = static_cast<Eigen::Index>(c.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t li = params.blocks.size(); li-- > 0;) {
    const auto& b = params.blocks[li];
    auto& gb = grads.blocks[li];
    const auto& t = tape.blocks[li];
    const bool base = !b.q.has_lora();

    // MLP residual branch.
    Mat dg = linear_bwd(b.down, t.down, dx, s, &gb.down, base);
    dg.array() *= t.pre_act.unaryExpr([](double v) { return gelu_grad(v); }).array();
    const Mat dh2 = linear_bwd(b.up, t.up, dg, s, &gb.up, base);
    dx += norm_bwd(b.ln2, t.ln2, dh2, &gb.ln2);

    // Attention residual branch.
    const Mat dctx = linear_bwd(b.o, t.o, dx, s, &gb.o, base);
    Mat dQ(L, d), dK(L, d), dV(L, d);
    for (Eigen::Index h = 0; h < H; ++h) {
      const Mat& P = t.probs[static_cast<std::size_t>(h)];
      const auto dc = dctx.middleCols(h * dh, dh);
      const Mat dP = dc * t.V.middleCols(h * dh, dh).transpose();
      dV.middleCols(h * dh, dh).noalias() = P.transpose() * dc;
      const Vec inner = (dP.array() * P.array()).rowwise().sum();
      const Mat dS = (P.array() * (dP.colwise() - inner).array()).matrix() * scale;
      dQ.middleCols(h * dh, dh).noalias() = dS * t.K.middleCols(h * dh, dh);
      dK.middleCols(h * dh, dh).noalias() = dS.transpose() * t.Q.middleCols(h * dh, dh);
    }
    Mat dh1 = linear_bwd(b.q, t.q, dQ, s, &gb.q, base);
    dh1 += linear_bwd(b.k, t.k, dK, s, &gb.k, base);
    dh1 += linear_bwd(b.v, t.v, dV, s, &gb.v, base);
    dx += norm_bwd(b.ln1, t.ln1, dh1, &gb.ln1);
  }

  // Embeddings.
  grads.pos_emb.topRows(L) += dx;
  for (Eigen::Index i = 0; i < L; ++i) {
    const int id = seq.ids[static_cast<std::size_t>(i)];
    if (id >= 0) grads.tok_emb.row(id) += dx.row(i);
  }
  if (const auto* aud = seq.find(Role::Aud)) {
    const Mat du = dx.middleRows(static_cast<Eigen::Index>(aud->begin), static_cast<Eigen::Index>(aud->size()));
    const Mat da = du * params.audio_aligner.W.transpose();
    grads.audio_proj.W.noalias() += tape.audio_features.transpose() * da;
    grads.audio_proj.b += da.colwise().sum();
  }
  return loss;
}

Score score_from_logits(double real_logit, double fake_logit) {
  Score sc;
  sc.p_fake = 1.0 / (1.0 + std::exp(real_logit - fake_logit));
  sc.p_real = 1.0 - sc.p_fake;
  sc.label = sc.p_fake >= 0.5 ? evidence::Label::Fake : evidence::Label::Real;
  return sc;
}

Score predict_score(const TokenSequence& seq, const Params& params) {
  const std::size_t last = seq.prompt_length();
  if (last == 0) throw DataError("predict: empty prompt");
  const Mat hidden = run(seq, params, nullptr, nullptr);
  const Mat z = head_logits(params, hidden.row(static_cast<Eigen::Index>(last - 1)));
  return score_from_logits(z(0, kReal), z(0, kFake));
}

}  // namespace tfev::model
