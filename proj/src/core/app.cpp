// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "core/error.hpp"
#include "core/eval.hpp"

namespace clpdd {

namespace {

namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void prepare_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    fail(ErrorCode::kIo,
         "cannot create output directory " + out_dir.string() + ": " +
             ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

void write_curve(const fs::path& path, std::span<const CurveRow> curve) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  write_curve_csv(curve, out);
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

ProbeSettings probe_for(const RunConfig& cfg, std::uint64_t seed) {
  ProbeSettings p = cfg.probe;
  p.seed = seed;
  return p;
}

DistillConfig distill_for(const RunConfig& cfg, std::uint64_t seed,
                          OuterObjective objective) {
  DistillConfig d = cfg.distill;
  d.seed = seed;
  d.outer_objective = objective;
  return d;
}

std::pair<double, double> score_set(const RunConfig& cfg, const Encoder& enc,
                                    const Dataset& set,
                                    const Dataset& eval_features,
                                    std::uint64_t seed) {
  const Matrix feats = enc.encode(set.inputs);
  const double probe =
      train_linear_probe(feats, set.labels, eval_features.inputs,
                         eval_features.labels, set.class_count,
                         probe_for(cfg, seed))
          .eval_acc;
  const double closed = closed_form_probe(feats, set.one_hot(),
                                          cfg.distill.lambda,
                                          eval_features.inputs,
                                          eval_features.labels)
                            .eval_acc;
  return {probe, closed};
}

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Results must
// not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("CLPDD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Datasets load_datasets(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.data.source == DataSource::kBlobs) {
    BlobParams p = cfg.data.blobs;
    p.seed = seed;
    auto [train, eval] = gen_blobs(p);
    return {std::move(train), std::move(eval)};
  }
  Datasets d;
  d.train = load_features(fs::path(cfg.data.train_path));
  d.train.split = Split::kTrain;
  if (cfg.data.eval_path.empty()) {
    d.eval = d.train;
  } else {
    d.eval = load_features(fs::path(cfg.data.eval_path));
    if (d.eval.dim() != d.train.dim()) {
      fail(ErrorCode::kDimensionMismatch, "train and eval files differ in dim");
    }
    d.eval.class_count = std::max(d.eval.class_count, d.train.class_count);
    d.train.class_count = d.eval.class_count;
  }
  d.eval.split = Split::kEval;
  return d;
}

MethodScores evaluate_methods(const RunConfig& cfg, const Datasets& data,
                              const Encoder& enc, std::uint64_t seed,
                              const SyntheticSet* distilled,
                              const SyntheticSet* mse_distilled) {
  if (!distilled) {
    fail(ErrorCode::kState,
         "neighbor baseline needs the distilled synthetic set; run "
         "distillation first");
  }
  const Dataset train_features = encode_dataset(enc, data.train);
  const Dataset eval_features = encode_dataset(enc, data.eval);
  const std::size_t ipc = distilled->ipc;

  MethodScores scores;
  auto record = [&](const char* name, const Dataset& set) {
    const auto [probe, closed] = score_set(cfg, enc, set, eval_features, seed);
    scores.probe[name] = probe;
    scores.closed_form[name] = closed;
  };

  const Dataset clpdd = distilled->to_dataset();
  record(kMethodClpdd, clpdd);
  if (mse_distilled) record(kMethodMse, mse_distilled->to_dataset());
  record(kMethodRandom, select_random(data.train, ipc, seed).set);
  record(kMethodCentroid,
         select_centroid(data.train, train_features.inputs, ipc).set);
  record(kMethodNeighbor,
         select_neighbor(data.train, train_features.inputs,
                         enc.encode(clpdd.inputs), clpdd.labels)
             .set);
  return scores;
}

RunReport cmd_distill(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const auto start = Clock::now();
  prepare_dir(out_dir);
  const std::uint64_t seed = cfg.distill.seed;
  const Datasets data = load_datasets(cfg, seed);
  const Encoder enc = cfg.distill.encoder.build(data.train.dim());
  DistillResult result = run_distill(cfg.distill, enc, data.train, &data.eval);

  const fs::path synthetic_path = out_dir / kSyntheticFile;
  save_features(result.synthetic.to_dataset(), synthetic_path, Precision::kF64);
  write_curve(out_dir / kCurveFile, result.curve);

  const Dataset eval_features = encode_dataset(enc, data.eval);
  const auto [probe, closed] =
      score_set(cfg, enc, result.synthetic.to_dataset(), eval_features, seed);

  RunReport report;
  report.command = "distill";
  report.config = cfg;
  report.curve = std::move(result.curve);
  report.synthetic_path = synthetic_path.string();
  report.accuracies[kMethodClpdd] = MethodStats::from({probe});
  report.closed_form_accuracies[kMethodClpdd] = MethodStats::from({closed});
  report.seeds = {seed};

  if (cfg.export_pca) {
    cmd_export_embeddings(cfg, synthetic_path, out_dir);
  }
  report.wall_clock_seconds = seconds_since(start);
  write_text(out_dir / kReportFile, report.to_json());
  return report;
}

RunReport cmd_eval(const RunConfig& cfg, const fs::path& synthetic_path,
                   const fs::path& out_dir) {
  cfg.validate();
  const auto start = Clock::now();
  prepare_dir(out_dir);
  const std::uint64_t seed = cfg.distill.seed;
  const Datasets data = load_datasets(cfg, seed);
  const Dataset synthetic = load_features(synthetic_path);
  if (synthetic.dim() != data.train.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "synthetic set dim does not match the configured data");
  }
  const Encoder enc = cfg.distill.encoder.build(data.train.dim());
  const auto [probe, closed] = score_set(cfg, enc, synthetic,
                                         encode_dataset(enc, data.eval), seed);
  RunReport report;
  report.command = "eval";
  report.config = cfg;
  report.synthetic_path = synthetic_path.string();
  report.accuracies[kMethodClpdd] = MethodStats::from({probe});
  report.closed_form_accuracies[kMethodClpdd] = MethodStats::from({closed});
  report.seeds = {seed};
  report.wall_clock_seconds = seconds_since(start);
  write_text(out_dir / kReportFile, report.to_json());
  return report;
}

RunReport run_compare(const RunConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t k = cfg.seeds;

  struct SeedResult {
    MethodScores scores;
    DistillResult clpdd;
  };
  std::vector<SeedResult> results(k);
  parallel_for(k, [&](std::size_t i) {
    const std::uint64_t seed = cfg.distill.seed + i;
    const Datasets data = load_datasets(cfg, seed);
    const Encoder enc = cfg.distill.encoder.build(data.train.dim());
    DistillResult ca = run_distill(
        distill_for(cfg, seed, OuterObjective::kClassAnchor), enc, data.train,
        &data.eval);
    const DistillResult mse = run_distill(
        distill_for(cfg, seed, OuterObjective::kMse), enc, data.train,
        &data.eval);
    results[i].scores =
        evaluate_methods(cfg, data, enc, seed, &ca.synthetic, &mse.synthetic);
    results[i].clpdd = std::move(ca);
  });

  RunReport report;
  report.command = "compare";
  report.config = cfg;
  for (std::size_t i = 0; i < k; ++i) report.seeds.push_back(cfg.distill.seed + i);
  for (const char* name : {kMethodClpdd, kMethodRandom, kMethodCentroid,
                           kMethodNeighbor, kMethodMse}) {
    std::vector<double> probe, closed;
    for (const auto& r : results) {
      probe.push_back(r.scores.probe.at(name));
      closed.push_back(r.scores.closed_form.at(name));
    }
    report.accuracies[name] = MethodStats::from(std::move(probe));
    report.closed_form_accuracies[name] = MethodStats::from(std::move(closed));
  }
  report.curve = std::move(results.front().clpdd.curve);
  report.wall_clock_seconds = seconds_since(start);
  return report;
}

RunReport cmd_compare(const RunConfig& cfg, const fs::path& out_dir) {
  prepare_dir(out_dir);
  RunReport report = run_compare(cfg);
  write_curve(out_dir / kCurveFile, report.curve);
  write_text(out_dir / kReportFile, report.to_json());
  return report;
}

std::string cmd_sweep(const RunConfig& cfg, std::string_view param,
                      std::span<const std::string> values,
                      const fs::path& out_dir) {
  if (param != "tau" && param != "lambda" && param != "b_per_class") {
    fail(ErrorCode::kInvalidArgument,
         "unknown sweep parameter '" + std::string(param) +
             "' (expected tau, lambda or b_per_class)");
  }
  if (values.empty()) {
    fail(ErrorCode::kInvalidArgument, "sweep needs at least one value");
  }
  prepare_dir(out_dir);

  static constexpr const char* kOrder[] = {kMethodClpdd, kMethodRandom,
                                           kMethodCentroid, kMethodNeighbor,
                                           kMethodMse};
  std::ostringstream csv;
  csv << "param,value";
  for (const char* m : kOrder) csv << ',' << m << "_mean," << m << "_std";
  csv << '\n';
  for (const std::string& value : values) {
    RunConfig run = cfg;
    apply_config_value(run, param, value);
    const RunReport r = run_compare(run);
    csv << param << ',' << get_config_value(run, param);
    for (const char* m : kOrder) {
      const MethodStats& s = r.accuracies.at(m);
      csv << ',' << format_real(s.mean) << ',' << format_real(s.std);
    }
    csv << '\n';
  }
  write_text(out_dir / kSweepFile, csv.str());
  return csv.str();
}

void cmd_export_embeddings(const RunConfig& cfg, const fs::path& synthetic_path,
                           const fs::path& out_dir) {
  cfg.validate();
  prepare_dir(out_dir);
  const std::uint64_t seed = cfg.distill.seed;
  const Datasets data = load_datasets(cfg, seed);
  const Encoder enc = cfg.distill.encoder.build(data.train.dim());

  Dataset synthetic;
  if (synthetic_path.empty()) {
    synthetic = run_distill(cfg.distill, enc, data.train, &data.eval)
                    .synthetic.to_dataset();
  } else {
    synthetic = load_features(synthetic_path);
  }
  if (synthetic.dim() != data.train.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "synthetic set dim does not match the configured data");
  }

  const Matrix real_f = enc.encode(data.train.inputs);
  const Matrix syn_f = enc.encode(synthetic.inputs);
  Matrix stacked(real_f.rows() + syn_f.rows(), real_f.cols());
  for (std::size_t i = 0; i < real_f.rows(); ++i)
    std::copy(real_f.row(i).begin(), real_f.row(i).end(), stacked.row(i).begin());
  for (std::size_t i = 0; i < syn_f.rows(); ++i)
    std::copy(syn_f.row(i).begin(), syn_f.row(i).end(),
              stacked.row(real_f.rows() + i).begin());

  const PcaProjection pca = pca_project_2d(stacked);
  std::vector<EmbeddingRow> rows;
  rows.reserve(stacked.rows());
  for (std::size_t i = 0; i < stacked.rows(); ++i) {
    const bool is_syn = i >= real_f.rows();
    const std::size_t label = is_syn ? synthetic.labels[i - real_f.rows()]
                                     : data.train.labels[i];
    rows.push_back({pca.coords(i, 0), pca.coords(i, 1), label, is_syn});
  }
  std::ofstream out(out_dir / kEmbeddingsFile, std::ios::binary | std::ios::trunc);
  write_embeddings_csv(rows, out);
  if (!out) fail(ErrorCode::kIo, "failed writing embeddings");
}

}  // namespace clpdd
