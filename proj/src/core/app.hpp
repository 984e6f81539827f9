// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end commands behind the C API and the CLI. Every file a command
// writes lands directly under its out_dir.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "core/config.hpp"
#include "core/data.hpp"
#include "core/distill.hpp"
#include "core/encoder.hpp"
#include "core/report.hpp"

namespace clpdd {

inline constexpr const char* kSyntheticFile = "synthetic.clpf";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kCurveFile = "curve.csv";
inline constexpr const char* kEmbeddingsFile = "embeddings.csv";
inline constexpr const char* kSweepFile = "sweep.csv";

struct Datasets {
  Dataset train;
  Dataset eval;
};

// Blobs are generated from `seed`; files are loaded as-is (eval falls back to
// train when no eval_path is set).
Datasets load_datasets(const RunConfig& cfg, std::uint64_t seed);

// Worker cap for seed-parallel commands: CLPDD_THREADS if set, else the
// hardware concurrency.
std::size_t worker_count();

struct MethodScores {
  std::map<std::string, double> probe;        // train_linear_probe eval acc
  std::map<std::string, double> closed_form;  // closed_form_probe eval acc
};

// Scores the distilled sets and the selection baselines for one seed with
// the same probe protocol. The neighbor baseline needs `distilled`.
MethodScores evaluate_methods(const RunConfig& cfg, const Datasets& data,
                              const Encoder& enc, std::uint64_t seed,
                              const SyntheticSet* distilled,
                              const SyntheticSet* mse_distilled);

RunReport cmd_distill(const RunConfig& cfg, const std::filesystem::path& out_dir);
RunReport cmd_eval(const RunConfig& cfg,
                   const std::filesystem::path& synthetic_path,
                   const std::filesystem::path& out_dir);
// Does not touch the filesystem.
RunReport run_compare(const RunConfig& cfg);
RunReport cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir);
// One compare row per value with fixed seeds; writes sweep.csv and returns
// its contents.
std::string cmd_sweep(const RunConfig& cfg, std::string_view param,
                      std::span<const std::string> values,
                      const std::filesystem::path& out_dir);
// Distills first when synthetic_path is empty.
void cmd_export_embeddings(const RunConfig& cfg,
                           const std::filesystem::path& synthetic_path,
                           const std::filesystem::path& out_dir);

}  // namespace clpdd
