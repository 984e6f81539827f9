// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/report.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

namespace clpdd {

namespace {

nlohmann::ordered_json stats_json(const std::map<std::string, MethodStats>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const char* name : {kMethodClpdd, kMethodRandom, kMethodCentroid,
                           kMethodNeighbor, kMethodMse}) {
    const auto it = m.find(name);
    if (it == m.end()) continue;
    j[name] = {{"mean", it->second.mean},
               {"std", it->second.std},
               {"per_seed", it->second.per_seed}};
  }
  return j;
}

}  // namespace

MethodStats MethodStats::from(std::vector<double> values) {
  MethodStats s;
  if (!values.empty()) {
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(var / n);
  }
  s.per_seed = std::move(values);
  return s;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(config)) cfg[k] = v;
  j["config"] = std::move(cfg);
  j["seeds"] = seeds;
  j["synthetic_path"] = synthetic_path;
  j["accuracies"] = stats_json(accuracies);
  j["closed_form_accuracies"] = stats_json(closed_form_accuracies);
  j["iterations_recorded"] = curve.size();
  if (!curve.empty()) {
    j["initial_outer_loss"] = curve.front().outer_loss;
    j["final_outer_loss"] = curve.back().outer_loss;
  }
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j.dump(2);
}

void write_curve_csv(std::span<const CurveRow> curve, std::ostream& out) {
  out << "iteration,outer_loss,grad_norm,lr,eval_acc\n";
  for (const CurveRow& r : curve) {
    out << r.iteration << ',' << format_real(r.outer_loss) << ','
        << format_real(r.grad_norm) << ',' << format_real(r.lr) << ',';
    if (r.eval_acc) out << format_real(*r.eval_acc);
    out << '\n';
  }
}

void write_embeddings_csv(std::span<const EmbeddingRow> rows,
                          std::ostream& out) {
  out << "x,y,label,origin\n";
  for (const EmbeddingRow& r : rows) {
    out << format_real(r.x) << ',' << format_real(r.y) << ',' << r.label << ','
        << (r.synthetic ? "synthetic" : "real") << '\n';
  }
}

}  // namespace clpdd
