// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bilevel distillation loop. Each step encodes the (noised) synthetic inputs,
// solves the ridge probe in closed form, scores it on a fresh class-balanced
// real batch, and carries the outer gradient back through the solve and the
// frozen encoder to an Adam update of the synthetic inputs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core/adam.hpp"
#include "core/data.hpp"
#include "core/encoder.hpp"
#include "core/linalg.hpp"
#include "core/objective.hpp"
#include "core/rng.hpp"

namespace clpdd {

enum class InitMode { kRandomNormal, kFromReal };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kIdentity;
  std::size_t feature_dim = 0;  // 0 means same as the input dimension
  std::size_t hidden_dim = 64;  // mlp1 only
  std::uint64_t seed = 0;
  bool normalize = false;

  Encoder build(std::size_t input_dim) const;
  friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

struct DistillConfig {
  double lambda = 0.1;
  double tau = 0.07;
  std::size_t b_per_class = 4;
  std::size_t iterations = 1000;
  std::size_t ipc = 1;
  double lr = 0.05;
  AdamParams adam;
  OuterObjective outer_objective = OuterObjective::kClassAnchor;
  EncoderSpec encoder;
  double augment_noise_sigma = 0.01;
  InitMode init = InitMode::kRandomNormal;
  std::size_t eval_every = 250;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const DistillConfig&, const DistillConfig&) = default;
};

struct SyntheticSet {
  Matrix inputs;    // N × input_dim, learnable
  Matrix y_onehot;  // N × C, fixed
  std::size_t ipc = 0;

  std::size_t class_count() const noexcept { return y_onehot.cols(); }
  std::vector<std::size_t> labels() const;
  Dataset to_dataset() const;
  static SyntheticSet from_dataset(const Dataset& ds);
};

// Rows are class-major: ipc rows of class 0, then class 1, ...
SyntheticSet init_synthetic(std::size_t class_count, std::size_t ipc,
                            std::size_t input_dim, InitMode mode,
                            const Dataset* real, std::uint64_t seed);

OuterBatch sample_balanced_batch(const Dataset& real, std::size_t b_per_class,
                                 Rng& rng);

Matrix augment(const Matrix& inputs, double sigma, Rng& rng);

// Cosine annealing from base_lr at step 0 towards 0 at step `total`.
double cosine_lr(double base_lr, std::size_t step, std::size_t total);

struct MetaGradient {
  double loss;
  Matrix grad_inputs;  // ∂L/∂inputs
  Matrix grad_w;       // ∂L/∂W*
};

// Outer loss of the probe induced by `inputs` and its gradient with respect
// to those inputs. `batch` holds real features.
MetaGradient meta_gradient(const Matrix& inputs, const Matrix& y_onehot,
                           const Encoder& enc, const OuterBatch& batch,
                           double lambda, double tau,
                           OuterObjective objective);
// Forward pass only.
double meta_loss(const Matrix& inputs, const Matrix& y_onehot,
                 const Encoder& enc, const OuterBatch& batch, double lambda,
                 double tau, OuterObjective objective);

struct DistillState {
  SyntheticSet synthetic;
  AdamState adam;
  std::size_t iteration = 0;
  Rng batch_rng;
  Rng augment_rng;

  static DistillState start(SyntheticSet synthetic, std::uint64_t seed);
};

struct StepMetrics {
  double loss = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  double step_norm = 0.0;
};

inline constexpr double kGradientAbortNorm = 1e6;

// `real_features` is the encoded real training set.
StepMetrics distill_step(DistillState& state, const DistillConfig& cfg,
                         const Encoder& enc, const Dataset& real_features);

struct CurveRow {
  std::size_t iteration = 0;
  double outer_loss = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  std::optional<double> eval_acc;
};

struct DistillResult {
  SyntheticSet synthetic;
  std::vector<CurveRow> curve;
};

// Runs cfg.iterations steps on `real` (raw inputs). Closed-form probe
// accuracy on `eval` (or `real` if absent) is logged every cfg.eval_every
// steps and at the last step.
DistillResult run_distill(const DistillConfig& cfg, const Encoder& enc,
                          const Dataset& real, const Dataset* eval = nullptr);

Dataset encode_dataset(const Encoder& enc, const Dataset& ds);

}  // namespace clpdd
