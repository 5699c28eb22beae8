// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tfev/digest.hpp"
#include "tfev/error.hpp"
#include "tfev/evidence/sample.hpp"
#include "tfev/features/representation.hpp"
#include "tfev/ingest/protocol.hpp"
#include "tfev/ingest/synth.hpp"
#include "tfev/model/attention.hpp"
#include "tfev/model/checkpoint.hpp"
#include "tfev/signal/wav.hpp"
#include "tfev/train/ablation.hpp"

namespace tfev::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Resolved configuration: defaults, then the config file, then flags.
struct Settings {
  features::FeatureConfig features{};
  model::ModelConfig model{};
  train::TrainConfig train{};
  ingest::SynthConfig synth{};
  features::RepKind rep = features::RepKind::Cqt;
  evidence::Colormap colormap = evidence::Colormap::Viridis;

  evidence::RenderConfig render() const { return {model.image_width, model.image_height, colormap}; }
  model::Prompts prompts() const { return model::Prompts::for_representation(rep); }

  json to_json() const {
    return {{"features", features},
            {"model", model},
            {"train", train},
            {"synth", synth},
            {"representation", std::string(features::to_string(rep))},
            {"colormap", std::string(evidence::to_string(colormap))}};
  }
};

Settings load_settings(const std::string& path) {
  Settings s;
  if (path.empty()) return s;
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError("config: top level of '" + path + "' must be an object");
  static const char* kKeys[] = {"features", "model", "train", "synth", "representation", "colormap", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw DataError("config: unknown key '" + key + "' in '" + path + "'");
    }
  }
  try {
    if (j.contains("features")) s.features = j.at("features").get<features::FeatureConfig>();
    if (j.contains("model")) s.model = j.at("model").get<model::ModelConfig>();
    if (j.contains("train")) s.train = j.at("train").get<train::TrainConfig>();
    if (j.contains("synth")) s.synth = j.at("synth").get<ingest::SynthConfig>();
    if (j.contains("representation")) s.rep = features::parse_rep_kind(j.at("representation").get<std::string>());
    if (j.contains("colormap")) s.colormap = evidence::parse_colormap(j.at("colormap").get<std::string>());
    if (j.contains("seed")) s.model.seed = s.train.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError("config: bad value in '" + path + "': " + e.what());
  } catch (const UsageError& e) {
    throw DataError("config: " + std::string(e.what()));
  }
  return s;
}

// Tracks the files a subcommand reads and writes, and records them in run.json.
class Run {
 public:
  Run(std::string subcommand, std::vector<std::string> args, fs::path dir, json config)
      : subcommand_(std::move(subcommand)), args_(std::move(args)), dir_(std::move(dir)), config_(std::move(config)) {
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }

  void input(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("input '" + path.string() + "' not found");
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  }

  /// Records a file already written under the output directory.
  void output(const fs::path& path) {
    outputs_.push_back({{"path", fs::relative(path, dir_).generic_string()}, {"sha256", sha256_file(path)}});
  }

  void write_text(const fs::path& rel, const std::string& text) {
    const auto path = dir_ / rel;
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
    f.close();
    output(path);
  }

  void finish() const {
    const json run = {{"subcommand", subcommand_},
                      {"args", args_},
                      {"config", config_},
                      {"config_digest", sha256_hex(config_.dump())},
                      {"inputs", inputs_},
                      {"outputs", outputs_}};
    std::ofstream f(dir_ / "run.json", std::ios::binary);
    if (!f) throw IoError("cannot write run manifest in '" + dir_.string() + "'");
    f << run.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  fs::path dir_;
  json config_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

fs::path output_dir(const std::string& flag, const std::string& subcommand) {
  if (!flag.empty()) return flag;
  if (const char* root = std::getenv("TFEV_OUT_ROOT"); root != nullptr && *root != '\0') {
    return fs::path(root) / subcommand;
  }
  return fs::path("tfev_out") / subcommand;
}

/// Echo written at the top of every CSV report: resolved config and seed.
json csv_echo(const Settings& s) { return {{"config", s.to_json()}, {"seed", s.train.seed}}; }

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

evidence::Manifest load_manifest(Run& run, const std::string& path) {
  run.input(path);
  return evidence::read_manifest(fs::path(path));
}

fs::path manifest_dir(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

train::Dataset load_dataset(Run& run, const std::string& path, const model::ModelConfig& config, const Settings& s,
                            std::optional<evidence::Split> split, const std::string& name) {
  auto manifest = load_manifest(run, path);
  if (split) manifest = evidence::filter_split(manifest, *split);
  if (manifest.empty()) throw DataError("manifest '" + path + "' has no usable samples");
  train::PrepareOptions opt;
  opt.representation = s.rep;
  opt.features = s.features;
  opt.colormap = s.colormap;
  return train::prepare_dataset(manifest, manifest_dir(path), config, opt, name);
}

std::string report_csv(const std::vector<train::EvalReport>& reports, const json& echo) {
  std::ostringstream out;
  for (const auto& [key, value] : echo.items()) out << "# " << key << '=' << value.dump() << '\n';
  out << "dataset,domain,representation,setting,acc,f1,auc,n,tp,fp,tn,fn\n";
  for (const auto& r : reports) {
    out << r.dataset << ',' << r.domain << ',' << r.representation << ',' << model::to_string(r.setting) << ','
        << fixed2(r.acc) << ',' << fixed2(r.f1) << ',' << fixed2(r.auc) << ',' << r.n_samples << ',' << r.counts.tp
        << ',' << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn << '\n';
  }
  return out.str();
}

// ---- featurize ----

void cmd_featurize(Run& run, const Settings& s, const std::vector<std::string>& inputs, std::size_t workers,
                   bool csv, std::ostream& out) {
  std::map<std::string, std::string> stems;
  for (const auto& in : inputs) {
    run.input(in);
    const auto stem = fs::path(in).stem().string();
    if (!stems.emplace(stem, in).second) throw DataError("featurize: inputs '" + stems[stem] + "' and '" + in +
                                                         "' share the output name '" + stem + "'");
  }
  workers = std::max<std::size_t>(1, std::min(workers, inputs.size()));
  std::vector<std::exception_ptr> errors(inputs.size());
  const auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < inputs.size(); i += workers) {
      try {
        const auto tf = features::compute_representation(signal::load_wav(inputs[i]), s.rep, s.features);
        const auto stem = fs::path(inputs[i]).stem().string();
        features::write_tfmatrix(tf, run.dir() / (stem + ".tfm"));
        if (csv) {
          std::ofstream f(run.dir() / (stem + ".csv"));
          features::write_tfmatrix_csv(tf, f);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& in : inputs) {
    const auto stem = fs::path(in).stem().string();
    run.output(run.dir() / (stem + ".tfm"));
    if (csv) run.output(run.dir() / (stem + ".csv"));
  }
  out << "featurized " << inputs.size() << " file(s) as " << features::to_string(s.rep) << " into "
      << run.dir().string() << '\n';
}

// ---- render ----

void cmd_render(Run& run, const Settings& s, const std::vector<std::string>& inputs, const std::string& format,
                std::ostream& out) {
  const auto fmt = evidence::parse_image_format(format);
  for (const auto& in : inputs) {
    run.input(in);
    const auto tf = features::read_tfmatrix(in);
    const auto image = evidence::render_evidence(tf, s.render());
    const auto path = run.dir() / (fs::path(in).stem().string() + "." + format);
    evidence::encode_image_file(image, path, fmt);
    run.output(path);
  }
  out << "rendered " << inputs.size() << " image(s) into " << run.dir().string() << '\n';
}

// ---- build-manifest ----

void cmd_build_manifest(Run& run, const Settings& s, const std::string& protocol, const std::string& audio_root,
                        const std::string& split, const std::string& domain, bool allow_missing, bool images,
                        std::ostream& out) {
  run.input(protocol);
  ingest::ProtocolOptions opt;
  opt.audio_root = fs::absolute(audio_root);
  opt.split = evidence::parse_split(split);
  opt.domain = domain;
  opt.allow_missing_audio = allow_missing;
  auto manifest = ingest::parse_protocol(fs::path(protocol), opt);
  if (images) evidence::attach_evidence_images(manifest, run.dir(), "images", s.features, s.render(), s.rep);
  evidence::write_manifest(manifest, run.dir() / "manifest.jsonl");
  for (const auto& m : manifest) {
    if (!m.image_path.empty()) run.output(run.dir() / m.image_path);
  }
  run.output(run.dir() / "manifest.jsonl");
  out << "wrote manifest with " << manifest.size() << " sample(s) to " << (run.dir() / "manifest.jsonl").string()
      << '\n';
}

// ---- synth-data ----

evidence::Manifest synth_split(Run& run, const Settings& s, const ingest::SynthConfig& cfg, const fs::path& rel,
                               evidence::Split split, bool images) {
  ingest::SynthOutput so;
  so.dir = run.dir() / rel / "audio";
  so.split = split;
  auto manifest = ingest::synth_dataset(cfg, so);
  for (auto& m : manifest) m.audio_path = (fs::path("audio") / m.audio_path).generic_string();
  if (images) evidence::attach_evidence_images(manifest, run.dir() / rel, "images", s.features, s.render(), s.rep);
  evidence::write_manifest(manifest, run.dir() / rel / "manifest.jsonl");
  for (const auto& m : manifest) {
    run.output(run.dir() / rel / m.audio_path);
    if (!m.image_path.empty()) run.output(run.dir() / rel / m.image_path);
  }
  run.output(run.dir() / rel / "manifest.jsonl");
  return manifest;
}

void cmd_synth(Run& run, const Settings& s, const std::string& split, bool images, std::ostream& out) {
  const auto manifest = synth_split(run, s, s.synth, ".", evidence::parse_split(split), images);
  out << "synthesized " << manifest.size() << " utterance(s) of domain " << ingest::to_string(s.synth.domain)
      << " into " << run.dir().string() << '\n';
}

// ---- train ----

json checkpoint_meta(const Settings& s) {
  return {{"train", s.train},
          {"representation", std::string(features::to_string(s.rep))},
          {"setting", std::string(model::to_string(s.train.setting))}};
}

void cmd_train(Run& run, const Settings& s, const std::string& manifest, std::ostream& out) {
  const auto data = load_dataset(run, manifest, s.model, s, evidence::Split::Train, "train");
  const auto result = train::train(data, model::init_params(s.model), s.train, s.prompts());
  const auto ckpt = run.dir() / "checkpoint.ckpt";
  model::save_checkpoint(result.params, ckpt, checkpoint_meta(s));
  run.output(ckpt);
  std::ostringstream curve;
  train::write_loss_curve(curve, result.curve, csv_echo(s));
  run.write_text("loss_curve.csv", curve.str());
  const auto fit = train::evaluate(data, result.params, s.train.setting, s.prompts()).report;
  run.write_text("train_eval.csv", report_csv({fit}, csv_echo(s)));
  out << "trained " << model::to_string(s.train.setting) << " for " << s.train.total_steps
      << " steps: final loss " << result.curve.back().loss << ", train ACC " << fixed2(fit.acc) << '\n';
}

// ---- eval ----

void cmd_eval(Run& run, Settings s, const std::string& manifest, const std::string& checkpoint,
              const std::string& setting_flag, const std::string& split, std::ostream& out) {
  run.input(checkpoint);
  const auto ck = model::load_checkpoint(checkpoint);
  s.model = ck.params.config;
  s.train.setting = model::parse_setting(
      !setting_flag.empty() ? setting_flag : ck.meta.value("setting", std::string(model::to_string(s.train.setting))));
  if (setting_flag.empty() && ck.meta.contains("representation")) {
    s.rep = features::parse_rep_kind(ck.meta.at("representation").get<std::string>());
  }
  std::optional<evidence::Split> sp;
  if (split != "all") sp = evidence::parse_split(split);
  const auto data = load_dataset(run, manifest, s.model, s, sp, fs::path(manifest).parent_path().filename().string());
  const auto r = train::evaluate(data, ck.params, s.train.setting, s.prompts());
  run.write_text("eval.csv", report_csv({r.report}, csv_echo(s)));
  std::ostringstream scores;
  scores << "id,label,p_fake,prediction\n";
  scores.precision(17);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    scores << data.samples[i].id << ',' << evidence::to_string(data.samples[i].label) << ',' << r.p_fake[i] << ','
           << evidence::to_string(r.predictions[i]) << '\n';
  }
  run.write_text("scores.csv", scores.str());
  std::ostringstream text;
  text << "setting " << model::to_string(s.train.setting) << "  n " << r.report.n_samples << "  ACC "
       << fixed2(r.report.acc) << "  F1 " << fixed2(r.report.f1) << "  AUC " << fixed2(r.report.auc) << '\n';
  run.write_text("eval.txt", text.str());
  out << text.str();
}

// ---- ablate ----

void cmd_ablate(Run& run, const Settings& s, const std::string& train_m, const std::string& in_m,
                const std::string& shifted_m, std::ostream& out) {
  std::string tm = train_m, im = in_m, sm = shifted_m;
  if (tm.empty() != im.empty() || tm.empty() != sm.empty()) {
    throw UsageError("ablate: give all of --train, --in-domain and --shifted, or none to synthesize them");
  }
  if (tm.empty()) {
    auto cfg = s.synth;
    cfg.domain = ingest::SynthDomain::A;
    synth_split(run, s, cfg, "data/train", evidence::Split::Train, true);
    cfg.seed = s.synth.seed + 1;
    synth_split(run, s, cfg, "data/in_domain", evidence::Split::Eval, true);
    cfg.seed = s.synth.seed + 2;
    cfg.domain = ingest::SynthDomain::B;
    synth_split(run, s, cfg, "data/shifted", evidence::Split::Eval, true);
    tm = (run.dir() / "data/train/manifest.jsonl").string();
    im = (run.dir() / "data/in_domain/manifest.jsonl").string();
    sm = (run.dir() / "data/shifted/manifest.jsonl").string();
  }
  train::AblationData data{load_dataset(run, tm, s.model, s, evidence::Split::Train, "train"),
                           load_dataset(run, im, s.model, s, std::nullopt, "in_domain"),
                           load_dataset(run, sm, s.model, s, std::nullopt, "shifted")};
  const auto report = train::run_ablation(data, s.model, s.train, s.prompts());
  for (const auto& row : report.rows) {
    auto meta = checkpoint_meta(s);
    meta["setting"] = std::string(model::to_string(row.setting));
    meta["train"]["setting"] = meta["setting"];
    const auto path = run.dir() / "checkpoints" / (std::string(model::to_string(row.setting)) + ".ckpt");
    fs::create_directories(path.parent_path());
    model::save_checkpoint(row.params, path, meta);
    run.output(path);
  }
  std::ostringstream csv, table;
  train::write_ablation_csv(csv, report, csv_echo(s));
  train::write_ablation_table(table, report);
  run.write_text("ablation.csv", csv.str());
  run.write_text("ablation.txt", table.str());
  out << table.str();
}

// ---- attn-dump ----

void cmd_attn(Run& run, Settings s, const std::string& manifest, const std::string& checkpoint, std::size_t index,
              std::size_t layer, std::optional<std::size_t> head, const std::string& setting_flag, std::ostream& out) {
  run.input(checkpoint);
  const auto ck = model::load_checkpoint(checkpoint);
  s.model = ck.params.config;
  s.train.setting = model::parse_setting(
      !setting_flag.empty() ? setting_flag : ck.meta.value("setting", std::string(model::to_string(s.train.setting))));
  if (ck.meta.contains("representation")) {
    s.rep = features::parse_rep_kind(ck.meta.at("representation").get<std::string>());
  }
  const auto data = load_dataset(run, manifest, s.model, s, std::nullopt, "attn");
  if (index >= data.samples.size()) {
    throw DataError("attn-dump: index " + std::to_string(index) + " out of range for " +
                    std::to_string(data.samples.size()) + " samples");
  }
  train::Dataset one{data.name, data.representation, {data.samples[index]}};
  const auto inputs = train::encode_inputs(one, ck.params, s.train.setting);
  const auto seq = model::assemble_sequence(s.train.setting, inputs[0], s.prompts());
  const auto ex = model::export_attention(seq, ck.params, layer, head);
  std::ostringstream map, regions, segments;
  model::write_attention_map_csv(ex.map, map);
  model::write_region_csv(ex.regions, regions);
  segments << "role,begin,end\n";
  for (const auto& seg : seq.segments) {
    segments << model::to_string(seg.role) << ',' << seg.begin << ',' << seg.end << '\n';
  }
  run.write_text("attention_map.csv", map.str());
  run.write_text("regions.csv", regions.str());
  run.write_text("segments.csv", segments.str());
  out << "attention of layer " << layer << (head ? ", head " + std::to_string(*head) : ", mean over heads")
      << " for '" << data.samples[index].id << "' (" << seq.length() << " positions)\n";
}

// ---- plot ----

struct PlotRow {
  std::string domain, dataset, setting;
  double acc = 0.0;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string svg_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

void cmd_plot(Run& run, const std::string& report, std::ostream& out) {
  run.input(report);
  std::ifstream in(report);
  std::string line;
  std::vector<PlotRow> rows;
  std::vector<std::pair<std::string, double>> gains;  // domain label, gain
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("kind,", 0) == 0) continue;
    const auto c = split_csv(line);
    if (c.size() < 6) throw DataError("plot: malformed row at line " + std::to_string(line_no));
    try {
      if (c[0] == "report") rows.push_back({c[2], c[1], c[4], std::stod(c[5])});
      else if (c[0] == "gain") gains.push_back({c[2] + " (" + c[1] + ")", std::stod(c[5])});
    } catch (const std::exception&) {
      throw DataError("plot: non-numeric value at line " + std::to_string(line_no));
    }
  }
  if (rows.empty()) throw DataError("plot: no report rows in '" + report + "'");

  std::vector<std::string> domains;
  for (const auto& r : rows) {
    const auto label = r.domain + " (" + r.dataset + ")";
    if (std::find(domains.begin(), domains.end(), label) == domains.end()) domains.push_back(label);
  }
  const double bar = 40, gap = 10, group_gap = 60, top = 60, height = 300, left = 60;
  const std::size_t per_group = 3;
  const double group_w = per_group * bar + (per_group - 1) * gap;
  const double width = left + domains.size() * (group_w + group_gap) + 40;
  const char* colors[] = {"#4c72b0", "#dd8452", "#55a868"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << top + height + 110
      << "\">\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"16\">ACC per input setting</text>\n";
  svg << "<line x1=\"" << left - 5 << "\" y1=\"" << top + height << "\" x2=\"" << width - 20 << "\" y2=\""
      << top + height << "\" stroke=\"black\"/>\n";
  for (std::size_t g = 0; g < domains.size(); ++g) {
    const double x0 = left + g * (group_w + group_gap);
    std::size_t k = 0;
    for (const auto& r : rows) {
      if (r.domain + " (" + r.dataset + ")" != domains[g]) continue;
      const double h = height * std::clamp(r.acc, 0.0, 100.0) / 100.0;
      const double x = x0 + k * (bar + gap);
      svg << "<rect class=\"bar\" data-setting=\"" << svg_escape(r.setting) << "\" data-acc=\"" << fixed2(r.acc)
          << "\" x=\"" << x << "\" y=\"" << top + height - h << "\" width=\"" << bar << "\" height=\"" << h
          << "\" fill=\"" << colors[k % 3] << "\"/>\n";
      svg << "<text x=\"" << x + bar / 2 << "\" y=\"" << top + height - h - 4
          << "\" font-size=\"10\" text-anchor=\"middle\">" << fixed2(r.acc) << "</text>\n";
      svg << "<text x=\"" << x + bar / 2 << "\" y=\"" << top + height + 14
          << "\" font-size=\"9\" text-anchor=\"middle\">" << svg_escape(r.setting) << "</text>\n";
      ++k;
    }
    svg << "<text x=\"" << x0 << "\" y=\"" << top + height + 34 << "\" font-size=\"12\">" << svg_escape(domains[g])
        << "</text>\n";
    for (const auto& [label, gain] : gains) {
      if (label != domains[g]) continue;
      svg << "<text class=\"delta\" data-delta=\"" << fixed2(gain) << "\" x=\"" << x0 << "\" y=\""
          << top + height + 54 << "\" font-size=\"12\">&#916; = ACC(fused) &#8722; ACC(acoustic_only) = "
          << (gain >= 0 ? "+" : "") << fixed2(gain) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  run.write_text("ablation.svg", svg.str());
  out << "wrote " << (run.dir() / "ablation.svg").string() << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tfev: time-frequency evidence for speech deepfake detection"};
  app.name("tfev");
  app.require_subcommand(1);

  std::string config_path, out_flag, rep_flag, setting_flag, colormap_flag;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps, batch;
  std::optional<double> lr;
  const auto common = [&](CLI::App* sub, bool training) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_flag, "output directory (default $TFEV_OUT_ROOT/<subcommand>)");
    sub->add_option("--seed", seed, "seed for model init, data order and synthesis");
    sub->add_option("--rep", rep_flag, "time-frequency representation")
        ->check(CLI::IsMember({"mel", "stft", "lfcc", "mfcc", "cqcc", "cqt"}));
    sub->add_option("--colormap", colormap_flag, "evidence colormap");
    if (training) {
      sub->add_option("--steps", steps, "optimizer steps");
      sub->add_option("--lr", lr, "peak learning rate");
      sub->add_option("--batch-size", batch, "samples per step");
    }
  };

  std::vector<std::string> inputs;
  std::size_t workers = 1;
  bool csv = false;
  auto* featurize = app.add_subcommand("featurize", "compute a representation of WAV files");
  common(featurize, false);
  featurize->add_option("--in", inputs, "input WAV files")->required()->check(CLI::ExistingFile);
  featurize->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  featurize->add_flag("--csv", csv, "also write CSV");

  std::string format = "ppm";
  auto* render = app.add_subcommand("render", "render .tfm matrices as evidence images");
  common(render, false);
  render->add_option("--in", inputs, "input .tfm files")->required()->check(CLI::ExistingFile);
  render->add_option("--format", format, "ppm or png")->check(CLI::IsMember({"ppm", "png"}));

  std::string protocol, audio_root, split = "train", domain;
  bool allow_missing = false, no_images = false;
  auto* build = app.add_subcommand("build-manifest", "turn a protocol file into a manifest with evidence images");
  common(build, false);
  build->add_option("--protocol", protocol, "protocol file")->required()->check(CLI::ExistingFile);
  build->add_option("--audio-root", audio_root, "directory holding <utt>.flac or <utt>.wav")->required();
  build->add_option("--split", split, "train, dev or eval");
  build->add_option("--domain", domain, "domain tag");
  build->add_flag("--allow-missing", allow_missing, "keep records whose audio is missing");
  build->add_flag("--no-images", no_images, "skip evidence rendering");

  std::string synth_domain;
  std::optional<std::size_t> n_samples;
  std::optional<double> duration;
  auto* synth = app.add_subcommand("synth-data", "generate a synthetic corpus");
  common(synth, false);
  synth->add_option("--domain", synth_domain, "A or B")->check(CLI::IsMember({"A", "B"}));
  synth->add_option("--n", n_samples, "number of utterances (even)");
  synth->add_option("--duration", duration, "seconds per utterance");
  synth->add_option("--split", split, "split tag");
  synth->add_flag("--no-images", no_images, "skip evidence rendering");

  std::string manifest, checkpoint;
  auto* trn = app.add_subcommand("train", "fine-tune on the train split of a manifest");
  common(trn, true);
  trn->add_option("--manifest", manifest, "manifest (JSON lines)")->required()->check(CLI::ExistingFile);
  trn->add_option("--setting", setting_flag, "audio_only, acoustic_only or fused");

  std::string eval_split = "all";
  auto* evl = app.add_subcommand("eval", "score a manifest with a checkpoint");
  common(evl, false);
  evl->add_option("--manifest", manifest, "manifest (JSON lines)")->required()->check(CLI::ExistingFile);
  evl->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  evl->add_option("--setting", setting_flag, "override the checkpoint's setting");
  evl->add_option("--split", eval_split, "train, dev, eval or all")
      ->check(CLI::IsMember({"train", "dev", "eval", "all"}));

  std::string train_m, in_m, shifted_m;
  auto* ablate = app.add_subcommand("ablate", "modality ablation over the three input settings");
  common(ablate, true);
  ablate->add_option("--train", train_m, "training manifest")->check(CLI::ExistingFile);
  ablate->add_option("--in-domain", in_m, "in-domain evaluation manifest")->check(CLI::ExistingFile);
  ablate->add_option("--shifted", shifted_m, "shifted-domain evaluation manifest")->check(CLI::ExistingFile);

  std::size_t index = 0, layer = 0;
  std::optional<std::size_t> head;
  auto* attn = app.add_subcommand("attn-dump", "export an attention map and its region matrices");
  common(attn, false);
  attn->add_option("--manifest", manifest, "manifest (JSON lines)")->required()->check(CLI::ExistingFile);
  attn->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  attn->add_option("--index", index, "sample index in the manifest");
  attn->add_option("--layer", layer, "layer index");
  attn->add_option("--head", head, "head index (default: mean over heads)");
  attn->add_option("--setting", setting_flag, "override the checkpoint's setting");

  std::string report;
  auto* plot = app.add_subcommand("plot", "SVG bar chart of an ablation report");
  common(plot, false);
  plot->add_option("--report", report, "ablation.csv")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    if (code != 0) err << '\n' << app.help();
    return code == 0 ? 0 : 1;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    Settings s = load_settings(config_path);
    if (seed) {
      s.model.seed = s.train.seed = *seed;
      s.synth.seed = *seed;
    }
    if (!rep_flag.empty()) s.rep = features::parse_rep_kind(rep_flag);
    if (!colormap_flag.empty()) s.colormap = evidence::parse_colormap(colormap_flag);
    if (!setting_flag.empty() && name == "train") s.train.setting = model::parse_setting(setting_flag);
    if (steps) s.train.total_steps = *steps;
    if (lr) s.train.lr = *lr;
    if (batch) s.train.batch_size = *batch;
    if (!synth_domain.empty()) s.synth.domain = ingest::parse_domain(synth_domain);
    if (n_samples) s.synth.n_samples = *n_samples;
    if (duration) s.synth.duration_s = *duration;
    s.model.validate();
    s.train.validate();

    Run run(name, args, output_dir(out_flag, name), s.to_json());
    if (name == "featurize") cmd_featurize(run, s, inputs, workers, csv, out);
    else if (name == "render") cmd_render(run, s, inputs, format, out);
    else if (name == "build-manifest")
      cmd_build_manifest(run, s, protocol, audio_root, split, domain, allow_missing, !no_images, out);
    else if (name == "synth-data") cmd_synth(run, s, split, !no_images, out);
    else if (name == "train") cmd_train(run, s, manifest, out);
    else if (name == "eval") cmd_eval(run, s, manifest, checkpoint, setting_flag, eval_split, out);
    else if (name == "ablate") cmd_ablate(run, s, train_m, in_m, shifted_m, out);
    else if (name == "attn-dump") cmd_attn(run, s, manifest, checkpoint, index, layer, head, setting_flag, out);
    else if (name == "plot") cmd_plot(run, report, out);
    run.finish();
    return 0;
  } catch (const UsageError& e) {
    err << "tfev " << name << ": " << e.what() << '\n' << sub->help();
    return 1;
  } catch (const DataError& e) {
    err << "tfev " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "tfev " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "tfev " << name << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tfev::cli
