// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "tfev/error.hpp"
#include "tfev/ingest/synth.hpp"
#include "tfev/model/checkpoint.hpp"
#include "tfev/train/ablation.hpp"

using namespace tfev;
using namespace tfev::train;
using Catch::Approx;
using evidence::Label;

namespace {

constexpr auto R = Label::Real;
constexpr auto F = Label::Fake;

model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.d_model = 32;
  c.n_layers = 2;
  c.n_heads = 4;
  c.ff_mult = 2;
  c.n_mels = 16;
  c.patch = 16;
  c.image_width = 64;
  c.image_height = 64;
  c.max_seq = 256;
  c.seed = 3;
  return c;
}

model::Prompts short_prompts() {
  model::Prompts p;
  p.sys = "sys";
  p.pre = "real or fake?";
  p.post = "CQT.";
  return p;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tfev_test_train_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// The 64-sample domain-A corpus prepared for the tiny model.
const Dataset& synth_train_set() {
  static const Dataset data = [] {
    const auto dir = scratch_dir("corpus");
    ingest::SynthConfig sc;
    const auto manifest = ingest::synth_dataset(sc, {dir});
    return prepare_dataset(manifest, dir, tiny_config(), {}, "synthA");
  }();
  return data;
}

}  // namespace

TEST_CASE("adamw with zero gradient scales decayed weights by (1 - lr*wd)") {
  const AdamWConfig cfg{};
  Mat p(2, 3);
  p << 1.0, -2.0, 3.5, 0.25, -0.75, 8.0;
  const Mat before = p;
  Mat g = Mat::Zero(2, 3), m = Mat::Zero(2, 3), v = Mat::Zero(2, 3);
  const double lr = 5e-5;
  adamw_update(p, g, m, v, 1, lr, true, cfg);
  const Mat expected = before * (1.0 - lr * 0.1);
  CHECK(p == expected);

  Mat q = before;
  adamw_update(q, g, m, v, 1, lr, false, cfg);
  CHECK(q == before);
}

TEST_CASE("adamw first step on a scalar matches the hand-computed update") {
  const AdamWConfig cfg{};
  const double lr = 5e-5;
  Mat p = Mat::Zero(1, 1), g = Mat::Ones(1, 1), m = Mat::Zero(1, 1), v = Mat::Zero(1, 1);
  adamw_update(p, g, m, v, 1, lr, false, cfg);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  CHECK(std::abs(p(0, 0) - (-lr / (1.0 + 1e-8))) < 1e-12);
  CHECK(m(0, 0) == Approx(0.1).margin(1e-15));
  CHECK(v(0, 0) == Approx(0.001).margin(1e-15));
}

TEST_CASE("adamw rejects step zero") {
  Mat p = Mat::Zero(1, 1), g = p, m = p, v = p;
  CHECK_THROWS_AS(adamw_update(p, g, m, v, 0, 1e-3, false, {}), DataError);
}

TEST_CASE("adamw_step leaves frozen tensors untouched and decays only matrices") {
  auto params = model::init_params(tiny_config());
  const auto before = params;
  auto grads = model::zeros_like(params);
  for_each_tensor(grads, [](const std::string&, Mat& g, model::TensorInfo) { g.setConstant(0.5); });
  auto state = make_adam_state(params);
  adamw_step(params, grads, state, 1, 1e-3, {});
  std::vector<std::pair<const Mat*, model::TensorInfo>> old;
  for_each_tensor(before, [&](const std::string&, const Mat& x, model::TensorInfo i) { old.push_back({&x, i}); });
  std::size_t k = 0;
  std::size_t frozen = 0, changed = 0;
  for_each_tensor(params, [&](const std::string& name, const Mat& x, model::TensorInfo info) {
    INFO(name);
    if (!info.trainable) {
      CHECK(x == *old[k].first);
      ++frozen;
    } else {
      CHECK(x != *old[k].first);
      ++changed;
    }
    ++k;
  });
  CHECK(frozen > 0);
  CHECK(changed > 0);
}

TEST_CASE("adamw_step names the tensor holding a non-finite gradient") {
  auto params = model::init_params(tiny_config());
  auto grads = model::zeros_like(params);
  grads.lm_head.W(0, 0) = std::nan("");
  auto state = make_adam_state(params);
  try {
    adamw_step(params, grads, state, 1, 1e-3, {});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("lm_head.W") != std::string::npos);
  }
}

TEST_CASE("lr_at ramps linearly then stays constant") {
  TrainConfig c;  // lr 5e-5, warmup 0.01 of 500 steps = 5
  CHECK(c.warmup_steps() == 5);
  CHECK(lr_at(0, c) == 0.0);
  CHECK(lr_at(1, c) == Approx(1e-5).epsilon(1e-12));
  CHECK(lr_at(5, c) == 5e-5);
  CHECK(lr_at(6, c) == 5e-5);
  CHECK(lr_at(500, c) == 5e-5);
  c.total_steps = 50;  // floor(0.5) = 0 warmup steps
  CHECK(lr_at(0, c) == 5e-5);
}

TEST_CASE("adamw on a convex quadratic decreases the loss monotonically after warmup") {
  TrainConfig tc;
  tc.total_steps = 2000;
  const AdamWConfig cfg{};
  Mat p(1, 4), target(1, 4), curv(1, 4);
  p << 0.3, -0.2, 0.1, 0.05;
  target << 0.0, 0.0, 0.0, 0.0;
  curv << 1.0, 3.0, 0.5, 10.0;
  Mat m = Mat::Zero(1, 4), v = Mat::Zero(1, 4);
  const auto loss = [&] { return 0.5 * (curv.array() * (p - target).array().square()).sum(); };
  double prev = loss();
  for (std::size_t t = 1; t <= tc.total_steps; ++t) {
    const Mat g = (curv.array() * (p - target).array()).matrix();
    adamw_update(p, g, m, v, t, lr_at(t, tc), true, cfg);
    const double now = loss();
    if (t >= tc.warmup_steps()) REQUIRE(now < prev);
    prev = now;
  }
}

TEST_CASE("train config validation and json round trip") {
  TrainConfig c;
  c.lr = 1e-3;
  c.total_steps = 17;
  c.setting = model::Setting::AcousticOnly;
  nlohmann::json j = c;
  const auto back = j.get<TrainConfig>();
  CHECK(back.lr == c.lr);
  CHECK(back.total_steps == 17);
  CHECK(back.setting == model::Setting::AcousticOnly);
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), DataError);
}

TEST_CASE("classification metrics fixtures") {
  SECTION("all correct") {
    const std::vector<Label> y{R, F, F, R};
    const auto m = classification_metrics(y, y);
    CHECK(m.acc == 100.0);
    CHECK(m.f1 == 100.0);
  }
  SECTION("TP 2, FP 1, FN 1, TN 0") {
    const std::vector<Label> y{F, F, R, F};
    const std::vector<Label> p{F, F, F, R};
    const auto m = classification_metrics(y, p);
    CHECK(m.counts == Confusion{2, 1, 0, 1});
    CHECK(m.f1 == Approx(66.67).margin(0.005));
    CHECK(m.acc == 50.0);
  }
  SECTION("no positives anywhere") {
    const std::vector<Label> y{R, R, R};
    const auto m = classification_metrics(y, y);
    CHECK(m.f1 == 0.0);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.acc == 100.0);
  }
  SECTION("length mismatch") {
    const std::vector<Label> y{R, F};
    const std::vector<Label> p{R};
    CHECK_THROWS_AS(classification_metrics(y, p), DataError);
  }
}

TEST_CASE("auc fixtures") {
  const std::vector<Label> y{F, F, R, R};
  CHECK(auc(std::vector<double>{0.9, 0.8, 0.3, 0.2}, y) == 1.0);
  CHECK(auc(std::vector<double>{0.9, 0.4, 0.6, 0.2}, y) == 0.75);
  CHECK(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<Label>{R, R}), DataError);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<Label>{F, F}), DataError);
}

TEST_CASE("auc equals the pairwise brute force exactly, including ties") {
  std::mt19937 gen(2026);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + gen() % 199;
    std::vector<double> s(n);
    std::vector<Label> y(n);
    std::vector<int> yi(n);
    const int levels = 1 + static_cast<int>(gen() % 20);  // coarse grids force ties
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % static_cast<unsigned>(levels)) / levels;
      yi[i] = static_cast<int>(gen() % 2);
    }
    yi[0] = 0;
    yi[1] = 1;
    for (std::size_t i = 0; i < n; ++i) y[i] = yi[i] ? F : R;
    INFO("trial " << trial << " n " << n);
    CHECK(auc(s, y) == oracle::auc_pairwise(s, yi));
  }
}

TEST_CASE("metrics are invariant to sample order") {
  std::mt19937 gen(7);
  std::vector<double> s(60);
  std::vector<Label> y(60), p(60);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<double>(gen() % 10) / 10.0;
    y[i] = i % 3 == 0 ? F : R;
    p[i] = gen() % 2 ? F : R;
  }
  const auto base = make_report(s, p, y);
  std::vector<std::size_t> idx(60);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(idx.begin(), idx.end(), gen);
    std::vector<double> s2;
    std::vector<Label> y2, p2;
    for (auto i : idx) {
      s2.push_back(s[i]);
      y2.push_back(y[i]);
      p2.push_back(p[i]);
    }
    const auto r = make_report(s2, p2, y2);
    CHECK(r.acc == base.acc);
    CHECK(r.f1 == base.f1);
    CHECK(r.auc == base.auc);
    CHECK(r.counts == base.counts);
  }
}

TEST_CASE("compute_gain reproduces the published CQT gains") {
  CHECK(compute_gain(99.46, 91.49) == Approx(7.97).margin(1e-9));
  CHECK(compute_gain(93.05, 91.18) == Approx(1.87).margin(1e-9));
  CHECK(compute_gain(88.0, 88.0) == 0.0);

  EvalReport fused, acoustic;
  fused.dataset = acoustic.dataset = "ASVspoof2019 LA";
  fused.representation = acoustic.representation = "cqt";
  fused.acc = 99.46;
  acoustic.acc = 91.49;
  CHECK(compute_gain(fused, acoustic) == Approx(7.97).margin(1e-9));
  acoustic.dataset = "ASVspoof2021 LA";
  CHECK_THROWS_AS(compute_gain(fused, acoustic), DataError);
}

TEST_CASE("train rejects an empty dataset and missing modalities") {
  const auto params = model::init_params(tiny_config());
  Dataset empty;
  empty.name = "empty";
  CHECK_THROWS_AS(train::train(empty, params, {}, short_prompts()), DataError);

  Dataset no_image;
  no_image.name = "audio only";
  no_image.samples.push_back({"x.wav", R, "A", Mat::Constant(3, 16, 0.5), {}});
  TrainConfig tc;
  tc.total_steps = 1;
  tc.setting = model::Setting::Fused;
  CHECK_THROWS_AS(train::train(no_image, params, tc, short_prompts()), DataError);
  tc.setting = model::Setting::AudioOnly;
  CHECK_NOTHROW(train::train(no_image, params, tc, short_prompts()));
}

TEST_CASE("prepare_dataset rejects images of the wrong size") {
  const auto dir = scratch_dir("badimage");
  ingest::SynthConfig sc;
  sc.n_samples = 2;
  auto manifest = ingest::synth_dataset(sc, {dir});
  auto cfg = tiny_config();
  evidence::EvidenceImage img{8, 8, std::vector<std::uint8_t>(8 * 8 * 3, 0)};
  evidence::encode_image_file(img, dir / "small.ppm", evidence::ImageFormat::Ppm);
  manifest[0].image_path = "small.ppm";
  CHECK_THROWS_AS(prepare_dataset(manifest, dir, cfg, {}), DataError);
}

TEST_CASE("training on the synthetic corpus drops below the uniform loss within 100 steps") {
  const auto& data = synth_train_set();
  REQUIRE(data.samples.size() == 64);
  TrainConfig tc;
  tc.total_steps = 100;
  tc.lr = 1e-3;
  const auto init = model::init_params(tiny_config());
  const auto result = train::train(data, init, tc, short_prompts());
  REQUIRE(result.curve.size() == 100);
  const double uniform = std::log(static_cast<double>(tiny_config().vocab));
  double tail = 0.0;
  for (std::size_t i = 90; i < 100; ++i) tail += result.curve[i].loss;
  CHECK(tail / 10.0 < uniform);
  CHECK(result.curve.back().loss < uniform);
  CHECK(result.curve[0].lr == 1e-3);  // 0.01 * 100 = 1 warmup step

  // Weights outside the trainable set keep their initial values bit for bit.
  CHECK(result.params.patch_embed.W == init.patch_embed.W);
  CHECK(result.params.vis_aligner.W == init.vis_aligner.W);
  CHECK(result.params.audio_aligner.W == init.audio_aligner.W);
  CHECK(result.params.vis_row_pos == init.vis_row_pos);
  CHECK(result.params.blocks[0].q.W == init.blocks[0].q.W);
  CHECK(result.params.blocks[0].q.B != init.blocks[0].q.B);
}

TEST_CASE("training is deterministic under a fixed seed") {
  const auto& data = synth_train_set();
  TrainConfig tc;
  tc.total_steps = 6;
  tc.lr = 1e-3;
  const auto init = model::init_params(tiny_config());
  const auto a = train::train(data, init, tc, short_prompts());
  const auto b = train::train(data, init, tc, short_prompts());
  CHECK(model::checkpoint_digest(a.params) == model::checkpoint_digest(b.params));
  std::ostringstream ca, cb;
  write_loss_curve(ca, a.curve, {{"seed", tc.seed}});
  write_loss_curve(cb, b.curve, {{"seed", tc.seed}});
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("# seed=0\nstep,lr,loss\n1,", 0) == 0);

  tc.seed = 1;
  const auto c = train::train(data, init, tc, short_prompts());
  CHECK(model::checkpoint_digest(c.params) != model::checkpoint_digest(a.params));
}

TEST_CASE("evaluate reports consistent counts and bounded metrics") {
  const auto& data = synth_train_set();
  const auto params = model::init_params(tiny_config());
  const auto r = evaluate(data, params, model::Setting::Fused, short_prompts());
  CHECK(r.report.n_samples == 64);
  CHECK(r.report.counts.n() == 64);
  CHECK(r.p_fake.size() == 64);
  for (double v : {r.report.acc, r.report.f1, r.report.auc}) {
    CHECK(v >= 0.0);
    CHECK(v <= 100.0);
  }
  for (std::size_t i = 0; i < r.p_fake.size(); ++i) {
    CHECK((r.p_fake[i] >= 0.5) == (r.predictions[i] == F));
  }
  CHECK(r.report.dataset == "synthA");
  CHECK(r.report.representation == "cqt");
}

TEST_CASE("ablation covers three settings on two domains and reruns identically") {
  const auto& data = synth_train_set();
  Dataset shifted = data;
  shifted.name = "shifted";
  AblationData ad{data, data, shifted};
  ad.in_domain.name = "held";
  TrainConfig tc;
  tc.total_steps = 3;
  tc.lr = 1e-3;
  const auto a = run_ablation(ad, tiny_config(), tc, short_prompts());
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].setting == model::Setting::AudioOnly);
  CHECK(a.rows[1].setting == model::Setting::AcousticOnly);
  CHECK(a.rows[2].setting == model::Setting::Fused);
  for (const auto& row : a.rows) {
    CHECK(row.in_domain.dataset == "held");
    CHECK(row.shifted.dataset == "shifted");
    CHECK(row.drop() == row.in_domain.acc - row.shifted.acc);
  }
  const auto& fused = a.at(model::Setting::Fused);
  const auto& acoustic = a.at(model::Setting::AcousticOnly);
  CHECK(std::abs(a.gain_in_domain - (fused.in_domain.acc - acoustic.in_domain.acc)) <= 1e-12);
  CHECK(std::abs(a.gain_shifted - (fused.shifted.acc - acoustic.shifted.acc)) <= 1e-12);

  const auto b = run_ablation(ad, tiny_config(), tc, short_prompts());
  std::ostringstream ca, cb, table;
  write_ablation_csv(ca, a, {{"seed", 0}});
  write_ablation_csv(cb, b, {{"seed", 0}});
  CHECK(ca.str() == cb.str());
  const auto csv = ca.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 1 + 6 + 2 + 3 + 3);
  CHECK(csv.find("kind,dataset,domain,representation,setting,acc,f1,auc,n,tp,fp,tn,fn\n") != std::string::npos);
  write_ablation_table(table, a);
  CHECK(table.str().find("acoustic_only") != std::string::npos);
  CHECK(table.str().find("Gain") != std::string::npos);
}
