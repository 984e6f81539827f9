// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Linear-probe evaluation of a (distilled or selected) training set, the
// real-sample selection baselines, and a 2-D PCA export.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/data.hpp"
#include "core/linalg.hpp"

namespace clpdd {

struct ProbeResult {
  Matrix w;  // d × C
  double train_acc = 0.0;
  double eval_acc = 0.0;
  std::size_t epochs_run = 0;
};

struct ProbeSettings {
  std::size_t epochs = 500;
  double lr = 0.01;
  std::size_t batch_size = 256;
  double init_std = 0.01;
  std::uint64_t seed = 0;

  friend bool operator==(const ProbeSettings&, const ProbeSettings&) = default;
};

// Fraction of rows whose argmax(features·w) equals the label; ties go to the
// lowest class index.
double probe_accuracy(const Matrix& features,
                      std::span<const std::size_t> labels, const Matrix& w);

// Softmax cross-entropy probe trained with minibatch Adam from a random
// normal start. Sets smaller than the batch size train full-batch.
ProbeResult train_linear_probe(const Matrix& train_features,
                               std::span<const std::size_t> train_labels,
                               const Matrix& eval_features,
                               std::span<const std::size_t> eval_labels,
                               std::size_t class_count,
                               const ProbeSettings& settings);

ProbeResult closed_form_probe(const Matrix& train_features,
                              const Matrix& y_onehot, double lambda,
                              const Matrix& eval_features,
                              std::span<const std::size_t> eval_labels);

struct Selection {
  std::vector<std::size_t> indices;  // rows of the source dataset
  Dataset set;
};

Selection select_random(const Dataset& real, std::size_t ipc,
                        std::uint64_t seed);
// ipc samples per class nearest (Euclidean) to their class feature mean;
// ties by lower index.
Selection select_centroid(const Dataset& real, const Matrix& features,
                          std::size_t ipc);
// For every synthetic row, the same-class real sample nearest in feature
// space; ties by lower index.
Selection select_neighbor(const Dataset& real, const Matrix& real_features,
                          const Matrix& synthetic_features,
                          std::span<const std::size_t> synthetic_labels);

struct PcaProjection {
  Matrix coords;                    // n × 2
  std::array<double, 2> explained;  // fraction of total variance
};

PcaProjection pca_project_2d(const Matrix& features);

}  // namespace clpdd
