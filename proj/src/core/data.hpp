// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Labelled sample sets: Gaussian-blob toy tasks and the CLPF feature file.
//
// CLPF layout, all integers little-endian:
//   "CLPF" | version u16 | flags u16 | n u64 | dim u64 | class_count u32 |
//   labels u32[n] | payload (f32 if flags bit0 else f64)[n·dim], row-major

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "core/linalg.hpp"

namespace clpdd {

enum class Split { kTrain, kEval };

struct Dataset {
  Matrix inputs;                    // n × input_dim
  std::vector<std::size_t> labels;  // length n
  std::size_t class_count = 0;
  Split split = Split::kTrain;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return inputs.cols(); }
  // Row indices per class, ascending.
  std::vector<std::vector<std::size_t>> indices_by_class() const;
  Matrix one_hot() const;
  // Throws on length mismatch, out-of-range labels, or non-finite inputs.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct BlobParams {
  std::size_t classes = 5;
  std::size_t dim = 16;
  std::size_t n_per_class = 250;
  double center_scale = 1.0;
  double cluster_std = 1.0;
  // Per-class random covariance instead of isotropic noise.
  bool anisotropic = false;
  std::uint64_t seed = 0;

  friend bool operator==(const BlobParams&, const BlobParams&) = default;
};

// Class centers ~ N(0, center_scale²I); samples ~ center + cluster_std·noise.
// ⌈0.8·c·n⌉ rows go to train, spread as evenly as possible across classes.
std::pair<Dataset, Dataset> gen_blobs(const BlobParams& params);

enum class Precision { kF32, kF64 };

inline constexpr std::uint16_t kClpfVersion = 1;

void save_features(const Dataset& ds, std::ostream& out,
                   Precision precision = Precision::kF64);
Dataset load_features(std::istream& in);

// Dispatches on extension: ".csv" uses the text format
// (header "label,f0,f1,..."), anything else CLPF.
void save_features(const Dataset& ds, const std::filesystem::path& path,
                   Precision precision = Precision::kF64);
Dataset load_features(const std::filesystem::path& path);

void save_features_csv(const Dataset& ds, std::ostream& out);
// class_count is one past the largest label seen, or `class_count` if given.
Dataset load_features_csv(std::istream& in, std::size_t class_count = 0);

}  // namespace clpdd
