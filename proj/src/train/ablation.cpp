// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfev/train/ablation.hpp"

#include <cstdio>
#include <ostream>

#include "tfev/error.hpp"
#include "tfev/model/checkpoint.hpp"

namespace tfev::train {

namespace {

constexpr model::Setting kSettings[] = {model::Setting::AudioOnly, model::Setting::AcousticOnly,
                                        model::Setting::Fused};

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

void report_row(std::ostream& out, const EvalReport& r) {
  out << "report," << r.dataset << ',' << r.domain << ',' << r.representation << ',' << model::to_string(r.setting)
      << ',' << fixed2(r.acc) << ',' << fixed2(r.f1) << ',' << fixed2(r.auc) << ',' << r.n_samples << ','
      << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn << '\n';
}

}  // namespace

const SettingResult& AblationReport::at(model::Setting setting) const {
  for (const auto& r : rows) {
    if (r.setting == setting) return r;
  }
  throw DataError("ablation: no result for setting " + std::string(model::to_string(setting)));
}

AblationReport run_ablation(const AblationData& data, const model::ModelConfig& model_config,
                            const TrainConfig& train_config, const model::Prompts& prompts) {
  if (data.in_domain.samples.empty() || data.shifted.samples.empty()) {
    throw DataError("ablation: in-domain and shifted evaluation sets must be non-empty");
  }
  const model::Params init = model::init_params(model_config);
  AblationReport report;
  for (const auto setting : kSettings) {
    TrainConfig cfg = train_config;
    cfg.setting = setting;
    auto trained = train(data.train, init, cfg, prompts);
    SettingResult row;
    row.setting = setting;
    row.in_domain = evaluate(data.in_domain, trained.params, setting, prompts).report;
    row.shifted = evaluate(data.shifted, trained.params, setting, prompts).report;
    row.final_loss = trained.curve.back().loss;
    row.checkpoint_digest = model::checkpoint_digest(trained.params);
    row.params = std::move(trained.params);
    report.rows.push_back(std::move(row));
  }
  const auto& fused = report.at(model::Setting::Fused);
  const auto& acoustic = report.at(model::Setting::AcousticOnly);
  report.gain_in_domain = compute_gain(fused.in_domain, acoustic.in_domain);
  report.gain_shifted = compute_gain(fused.shifted, acoustic.shifted);
  return report;
}

void write_ablation_csv(std::ostream& out, const AblationReport& report, const nlohmann::json& echo) {
  for (const auto& [key, value] : echo.items()) out << "# " << key << '=' << value.dump() << '\n';
  out << "kind,dataset,domain,representation,setting,acc,f1,auc,n,tp,fp,tn,fn\n";
  for (const auto& row : report.rows) {
    report_row(out, row.in_domain);
    report_row(out, row.shifted);
  }
  const auto& fused = report.at(model::Setting::Fused);
  out << "gain," << fused.in_domain.dataset << ',' << fused.in_domain.domain << ',' << fused.in_domain.representation
      << ",fused-acoustic_only," << fixed2(report.gain_in_domain) << ",,,,,,,\n";
  out << "gain," << fused.shifted.dataset << ',' << fused.shifted.domain << ',' << fused.shifted.representation
      << ",fused-acoustic_only," << fixed2(report.gain_shifted) << ",,,,,,,\n";
  for (const auto& row : report.rows) {
    out << "drop,," << row.in_domain.domain << "->" << row.shifted.domain << ',' << row.in_domain.representation
        << ',' << model::to_string(row.setting) << ',' << fixed2(row.drop()) << ",,,,,,,\n";
  }
  for (const auto& row : report.rows) {
    out << "# checkpoint " << model::to_string(row.setting) << '=' << row.checkpoint_digest << '\n';
  }
}

void write_ablation_table(std::ostream& out, const AblationReport& report) {
  char line[160];
  const auto& first = report.rows.front();
  std::snprintf(line, sizeof line, "%-14s | %-28s | %-28s\n", "Input Setting",
                ("in-domain (" + first.in_domain.dataset + ")").c_str(),
                ("shifted (" + first.shifted.dataset + ")").c_str());
  out << line;
  std::snprintf(line, sizeof line, "%-14s | %8s %8s %8s   | %8s %8s %8s\n", "", "ACC", "F1", "AUC", "ACC", "F1",
                "AUC");
  out << line;
  for (const auto& row : report.rows) {
    const auto& a = row.in_domain;
    const auto& b = row.shifted;
    std::snprintf(line, sizeof line, "%-14s | %8.2f %8.2f %8.2f   | %8.2f %8.2f %8.2f\n",
                  std::string(model::to_string(row.setting)).c_str(), a.acc, a.f1, a.auc, b.acc, b.f1, b.auc);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-14s | %8.2f %17s   | %8.2f\n", "Gain", report.gain_in_domain, "",
                report.gain_shifted);
  out << line;
}

}  // namespace tfev::train
