// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/distill.hpp"

namespace clpdd {

struct MethodStats {
  std::vector<double> per_seed;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation

  static MethodStats from(std::vector<double> values);
};

inline constexpr const char* kMethodClpdd = "clpdd";
inline constexpr const char* kMethodRandom = "random";
inline constexpr const char* kMethodCentroid = "centroid";
inline constexpr const char* kMethodNeighbor = "neighbor";
inline constexpr const char* kMethodMse = "mse_ablation";

struct RunReport {
  std::string command;
  RunConfig config;
  std::vector<CurveRow> curve;
  std::string synthetic_path;
  // Final linear-probe eval accuracy per method.
  std::map<std::string, MethodStats> accuracies;
  // Same sets scored by the closed-form ridge probe.
  std::map<std::string, MethodStats> closed_form_accuracies;
  std::vector<std::uint64_t> seeds;
  double wall_clock_seconds = 0.0;

  std::string to_json() const;
};

// iteration,outer_loss,grad_norm,lr,eval_acc
void write_curve_csv(std::span<const CurveRow> curve, std::ostream& out);

struct EmbeddingRow {
  double x;
  double y;
  std::size_t label;
  bool synthetic;
};
// x,y,label,origin
void write_embeddings_csv(std::span<const EmbeddingRow> rows, std::ostream& out);

}  // namespace clpdd
