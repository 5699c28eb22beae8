// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "tfev/digest.hpp"
#include "tfev/evidence/sample.hpp"
#include "tfev/ingest/synth.hpp"
#include "tfev/signal/wav.hpp"

namespace fs = std::filesystem;
using namespace tfev;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("tfev_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path tiny_config(const fs::path& dir) {
  const auto path = dir / "tiny.json";
  std::ofstream(path) << R"({"seed": 5,
    "model": {"d_model": 32, "n_heads": 4, "patch": 32},
    "train": {"lr": 0.001, "total_steps": 2, "batch_size": 2},
    "synth": {"n_samples": 4, "duration_s": 1.25}})";
  return path;
}

}  // namespace

TEST_CASE("cli usage errors exit with 1 and print usage") {
  auto r = run({});
  CHECK(r.code == 1);
  r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Subcommands") != std::string::npos);
  r = run({"featurize", "--bogus-flag"});
  CHECK(r.code == 1);
  r = run({"featurize", "--in", "/nonexistent/a.wav"});
  CHECK(r.code == 1);
  r = run({"--help"});
  CHECK(r.code == 0);
}

TEST_CASE("cli data errors exit with 2") {
  const auto dir = scratch("dataerr");
  std::ofstream(dir / "bad.json") << R"({"modle": {}})";
  auto r = run({"synth-data", "--config", (dir / "bad.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key 'modle'") != std::string::npos);

  std::ofstream(dir / "notwav.wav") << "not a wav file";
  r = run({"featurize", "--in", (dir / "notwav.wav").string(), "--out", (dir / "f").string()});
  CHECK(r.code == 2);

  std::ofstream(dir / "odd.json") << R"({"synth": {"n_samples": 3}})";
  r = run({"synth-data", "--config", (dir / "odd.json").string(), "--out", (dir / "s").string()});
  CHECK(r.code == 2);
}

TEST_CASE("featurize then render reproduces build_sample image bytes") {
  const auto dir = scratch("pipeline");
  ingest::SynthConfig sc;
  sc.n_samples = 2;
  const auto manifest = ingest::synth_dataset(sc, {dir / "audio"});
  const auto wav = dir / "audio" / manifest[1].audio_path;

  const auto ft = dir / "ft";
  REQUIRE(run({"featurize", "--rep", "cqt", "--in", wav.string(), "--out", ft.string()}).code == 0);
  const auto tfm = ft / (wav.stem().string() + ".tfm");
  REQUIRE(fs::exists(tfm));
  const auto rd = dir / "rd";
  REQUIRE(run({"render", "--in", tfm.string(), "--out", rd.string()}).code == 0);

  const auto direct = evidence::build_sample(signal::load_wav(wav), manifest[1].label,
                                             {wav, dir / "direct.ppm"}, {}, {});
  CHECK(slurp(rd / (wav.stem().string() + ".ppm")) == slurp(dir / "direct.ppm"));
}

TEST_CASE("featurize output does not depend on the worker count") {
  const auto dir = scratch("workers");
  ingest::SynthConfig sc;
  sc.n_samples = 4;
  sc.duration_s = 0.5;
  const auto manifest = ingest::synth_dataset(sc, {dir / "audio"});
  std::vector<std::string> base{"featurize", "--rep", "mel", "--csv"};
  for (const auto& m : manifest) {
    base.push_back("--in");
    base.push_back((dir / "audio" / m.audio_path).string());
  }
  auto one = base, three = base;
  one.insert(one.end(), {"--workers", "1", "--out", (dir / "w1").string()});
  three.insert(three.end(), {"--workers", "3", "--out", (dir / "w3").string()});
  REQUIRE(run(one).code == 0);
  REQUIRE(run(three).code == 0);
  for (const auto& m : manifest) {
    const auto stem = fs::path(m.audio_path).stem().string();
    CHECK(slurp(dir / "w1" / (stem + ".tfm")) == slurp(dir / "w3" / (stem + ".tfm")));
    CHECK(slurp(dir / "w1" / (stem + ".csv")) == slurp(dir / "w3" / (stem + ".csv")));
  }
}

TEST_CASE("run manifest lists config digest and every produced file") {
  const auto dir = scratch("runjson");
  const auto cfg = tiny_config(dir);
  const auto out = dir / "syn";
  REQUIRE(run({"synth-data", "--config", cfg.string(), "--out", out.string(), "--n", "2"}).code == 0);
  const auto j = json::parse(slurp(out / "run.json"));
  CHECK(j.at("subcommand") == "synth-data");
  CHECK(j.at("config_digest") == sha256_hex(j.at("config").dump()));
  CHECK(j.at("config").at("synth").at("n_samples") == 2);  // flag beats file
  CHECK(j.at("config").at("model").at("seed") == 5);       // file beats default
  std::size_t files = 0;
  for (const auto& o : j.at("outputs")) {
    const auto p = out / o.at("path").get<std::string>();
    CHECK(fs::exists(p));
    CHECK(sha256_file(p) == o.at("sha256"));
    ++files;
  }
  CHECK(files == 2 + 2 + 1);  // wav, ppm, manifest
  // Nothing is written outside the output directory.
  std::size_t entries = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) ++entries;
  }
  CHECK(entries == files + 2);  // plus run.json and the config file
}

TEST_CASE("output root defaults to TFEV_OUT_ROOT") {
  const auto dir = scratch("outroot");
  ::setenv("TFEV_OUT_ROOT", dir.c_str(), 1);
  const auto r = run({"synth-data", "--n", "2", "--duration", "0.5", "--no-images"});
  ::unsetenv("TFEV_OUT_ROOT");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "synth-data" / "manifest.jsonl"));
  CHECK(fs::exists(dir / "synth-data" / "run.json"));
}

TEST_CASE("build-manifest parses a protocol and renders evidence") {
  const auto dir = scratch("protocol");
  ingest::SynthConfig sc;
  sc.n_samples = 2;
  const auto m = ingest::synth_dataset(sc, {dir / "wavs"});
  const auto utt0 = fs::path(m[0].audio_path).stem().string();
  const auto utt1 = fs::path(m[1].audio_path).stem().string();
  std::ofstream(dir / "proto.txt") << "SPK1 " << utt0 << " - - bonafide\nSPK2 " << utt1 << " - A07 spoof\n";
  const auto out = dir / "bm";
  const auto r = run({"build-manifest", "--protocol", (dir / "proto.txt").string(), "--audio-root",
                      (dir / "wavs").string(), "--split", "eval", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto manifest = evidence::read_manifest(out / "manifest.jsonl");
  REQUIRE(manifest.size() == 2);
  CHECK(manifest[0].label == evidence::Label::Real);
  CHECK(manifest[1].label == evidence::Label::Fake);
  CHECK(manifest[1].split == evidence::Split::Eval);
  CHECK(fs::exists(out / manifest[0].image_path));

  std::ofstream(dir / "short.txt") << "SPK1 " << utt0 << " - bonafide\n";
  const auto bad = run({"build-manifest", "--protocol", (dir / "short.txt").string(), "--audio-root",
                        (dir / "wavs").string(), "--out", (dir / "bad").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("expected 5 fields at line 1") != std::string::npos);
}

TEST_CASE("train, eval and attn-dump run on a synthesized manifest") {
  const auto dir = scratch("train");
  const auto cfg = tiny_config(dir);
  REQUIRE(run({"synth-data", "--config", cfg.string(), "--out", (dir / "syn").string()}).code == 0);
  const auto manifest = (dir / "syn" / "manifest.jsonl").string();
  REQUIRE(run({"train", "--config", cfg.string(), "--manifest", manifest, "--setting", "acoustic_only", "--out",
               (dir / "tr").string()})
              .code == 0);
  const auto curve = slurp(dir / "tr" / "loss_curve.csv");
  CHECK(curve.find("# seed=5\n") != std::string::npos);
  CHECK(curve.find("step,lr,loss\n1,") != std::string::npos);

  const auto ckpt = (dir / "tr" / "checkpoint.ckpt").string();
  const auto ev = run({"eval", "--manifest", manifest, "--checkpoint", ckpt, "--out", (dir / "ev").string()});
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("acoustic_only") != std::string::npos);
  CHECK(slurp(dir / "ev" / "eval.csv").find("acoustic_only") != std::string::npos);

  const auto at = run({"attn-dump", "--manifest", manifest, "--checkpoint", ckpt, "--layer", "1", "--head", "2",
                       "--setting", "fused", "--out", (dir / "at").string()});
  REQUIRE(at.code == 0);
  const auto segments = slurp(dir / "at" / "segments.csv");
  CHECK(segments.rfind("role,begin,end\nsys,0,", 0) == 0);
  CHECK(segments.find("\nvis,") != std::string::npos);
  CHECK(slurp(dir / "at" / "regions.csv").rfind("stat,query_role,sys,aud,pre,vis,post\n", 0) == 0);

  const auto oob = run({"attn-dump", "--manifest", manifest, "--checkpoint", ckpt, "--layer", "7", "--out",
                        (dir / "at2").string()});
  CHECK(oob.code == 2);
}

TEST_CASE("ablate is byte-reproducible and plot echoes its values") {
  const auto dir = scratch("ablate");
  const auto cfg = tiny_config(dir);
  REQUIRE(run({"ablate", "--config", cfg.string(), "--out", (dir / "run1").string()}).code == 0);
  REQUIRE(run({"ablate", "--config", cfg.string(), "--out", (dir / "run2").string()}).code == 0);
  const auto csv = slurp(dir / "run1" / "ablation.csv");
  CHECK(csv == slurp(dir / "run2" / "ablation.csv"));
  for (const char* s : {"audio_only", "acoustic_only", "fused"}) {
    const auto name = std::string(s) + ".ckpt";
    CHECK(sha256_file(dir / "run1" / "checkpoints" / name) == sha256_file(dir / "run2" / "checkpoints" / name));
  }
  REQUIRE(run({"plot", "--report", (dir / "run1" / "ablation.csv").string(), "--out", (dir / "plot").string()})
              .code == 0);
  const auto svg = slurp(dir / "plot" / "ablation.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t bars = 0;
  for (auto p = svg.find("class=\"bar\""); p != std::string::npos; p = svg.find("class=\"bar\"", p + 1)) ++bars;
  CHECK(bars == 6);
  // Each report row's accuracy and each gain appear in the chart.
  std::istringstream rows(csv);
  std::string line;
  std::size_t deltas = 0;
  while (std::getline(rows, line)) {
    if (line.rfind("report,", 0) != 0 && line.rfind("gain,", 0) != 0) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells[0] == "report") {
      CHECK(svg.find("data-setting=\"" + cells[4] + "\" data-acc=\"" + cells[5] + "\"") != std::string::npos);
    } else {
      CHECK(svg.find("data-delta=\"" + cells[5] + "\"") != std::string::npos);
      ++deltas;
    }
  }
  CHECK(deltas == 2);
  CHECK(svg.find("ACC(fused) &#8722; ACC(acoustic_only)") != std::string::npos);
}
