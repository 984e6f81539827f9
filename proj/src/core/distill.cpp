// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/solver.hpp"

namespace clpdd {

std::string_view to_string(InitMode mode) {
  return mode == InitMode::kRandomNormal ? "random_normal" : "from_real";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "random_normal") return InitMode::kRandomNormal;
  if (name == "from_real") return InitMode::kFromReal;
  fail(ErrorCode::kInvalidArgument,
       "unknown init mode '" + std::string(name) + "'");
}

Encoder EncoderSpec::build(std::size_t input_dim) const {
  const std::size_t out = feature_dim ? feature_dim : input_dim;
  switch (kind) {
    case EncoderKind::kIdentity:
      if (out != input_dim) {
        fail(ErrorCode::kInvalidArgument,
             "identity encoder requires feature_dim == input_dim");
      }
      return Encoder::identity(input_dim, normalize);
    case EncoderKind::kLinear:
      return Encoder::linear(input_dim, out, seed, normalize);
    case EncoderKind::kMlp1:
      return Encoder::mlp1(input_dim, hidden_dim, out, seed, normalize);
  }
  fail(ErrorCode::kInvalidArgument, "bad encoder kind");
}

void DistillConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorCode::kConfig, std::string(name) + " must be positive");
    }
  };
  positive(lambda, "lambda");
  positive(tau, "tau");
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    fail(ErrorCode::kConfig, "lr must be non-negative");
  }
  positive(adam.eps, "adam_eps");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    fail(ErrorCode::kConfig, "adam betas must lie in [0, 1)");
  }
  if (b_per_class == 0) fail(ErrorCode::kConfig, "b_per_class must be >= 1");
  if (ipc == 0) fail(ErrorCode::kConfig, "ipc must be >= 1");
  if (eval_every == 0) fail(ErrorCode::kConfig, "eval_every must be >= 1");
  if (!(augment_noise_sigma >= 0.0)) {
    fail(ErrorCode::kConfig, "augment_noise_sigma must be non-negative");
  }
}

std::vector<std::size_t> SyntheticSet::labels() const {
  return argmax_rows(y_onehot);
}

Dataset SyntheticSet::to_dataset() const {
  Dataset ds;
  ds.inputs = inputs;
  ds.labels = labels();
  ds.class_count = class_count();
  return ds;
}

SyntheticSet SyntheticSet::from_dataset(const Dataset& ds) {
  ds.validate();
  SyntheticSet s;
  s.inputs = ds.inputs;
  s.y_onehot = ds.one_hot();
  const auto by_class = ds.indices_by_class();
  s.ipc = by_class.empty() ? 0 : by_class.front().size();
  for (const auto& members : by_class) {
    if (members.size() != s.ipc) {
      fail(ErrorCode::kInvalidArgument,
           "synthetic set must hold the same number of rows per class");
    }
  }
  return s;
}

SyntheticSet init_synthetic(std::size_t class_count, std::size_t ipc,
                            std::size_t input_dim, InitMode mode,
                            const Dataset* real, std::uint64_t seed) {
  if (class_count == 0 || ipc == 0 || input_dim == 0) {
    fail(ErrorCode::kInvalidArgument, "synthetic set needs nonzero sizes");
  }
  const std::size_t n = class_count * ipc;
  Rng rng = make_stream(seed, Stream::kInit);
  SyntheticSet s;
  s.ipc = ipc;
  s.y_onehot = Matrix(n, class_count);
  for (std::size_t i = 0; i < n; ++i) s.y_onehot(i, i / ipc) = 1.0;

  if (mode == InitMode::kRandomNormal) {
    s.inputs = random_normal(n, input_dim, 1.0, rng);
    return s;
  }

  if (!real) {
    fail(ErrorCode::kInsufficientData, "from_real init needs a real dataset");
  }
  if (real->dim() != input_dim || real->class_count != class_count) {
    fail(ErrorCode::kDimensionMismatch,
         "from_real init: dataset shape does not match synthetic set");
  }
  auto by_class = real->indices_by_class();
  s.inputs = Matrix(n, input_dim);
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& members = by_class[c];
    if (members.size() < ipc) {
      fail(ErrorCode::kInsufficientData,
           "from_real init: class " + std::to_string(c) + " has " +
               std::to_string(members.size()) + " samples, need " +
               std::to_string(ipc));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < ipc; ++k) {
      const auto src = real->inputs.row(members[k]);
      std::copy(src.begin(), src.end(), s.inputs.row(c * ipc + k).begin());
    }
  }
  return s;
}

OuterBatch sample_balanced_batch(const Dataset& real, std::size_t b_per_class,
                                 Rng& rng) {
  const auto by_class = real.indices_by_class();
  const std::size_t d = real.dim();
  Matrix x(real.class_count * b_per_class, d);
  std::vector<std::size_t> labels;
  labels.reserve(x.rows());

  std::size_t row = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& members = by_class[c];
    if (members.empty()) {
      fail(ErrorCode::kInsufficientData,
           "balanced batch: class " + std::to_string(c) + " is empty");
    }
    std::vector<std::size_t> chosen;
    if (members.size() >= b_per_class) {
      std::sample(members.begin(), members.end(), std::back_inserter(chosen),
                  b_per_class, rng);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      for (std::size_t k = 0; k < b_per_class; ++k)
        chosen.push_back(members[pick(rng)]);
    }
    for (std::size_t idx : chosen) {
      const auto src = real.inputs.row(idx);
      std::copy(src.begin(), src.end(), x.row(row++).begin());
      labels.push_back(c);
    }
  }
  return OuterBatch::make(std::move(x), std::move(labels), real.class_count);
}

Matrix augment(const Matrix& inputs, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "noise sigma must be non-negative");
  }
  if (sigma == 0.0) return inputs;
  return add(inputs, random_normal(inputs.rows(), inputs.cols(), sigma, rng));
}

double cosine_lr(double base_lr, std::size_t step, std::size_t total) {
  if (total == 0) return base_lr;
  const double frac = static_cast<double>(step) / static_cast<double>(total);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * frac));
}

MetaGradient meta_gradient(const Matrix& inputs, const Matrix& y_onehot,
                           const Encoder& enc, const OuterBatch& batch,
                           double lambda, double tau,
                           OuterObjective objective) {
  const Matrix features = enc.encode(inputs);
  const ProbeSolution sol = ridge_kernel(features, y_onehot, lambda);
  LossAndGrad outer = outer_loss(objective, batch, sol.w_star, tau);
  const Matrix grad_features = solve_backward(sol, features, outer.grad_w);
  return {outer.loss, enc.vjp(inputs, grad_features), std::move(outer.grad_w)};
}

double meta_loss(const Matrix& inputs, const Matrix& y_onehot,
                 const Encoder& enc, const OuterBatch& batch, double lambda,
                 double tau, OuterObjective objective) {
  const Matrix features = enc.encode(inputs);
  const ProbeSolution sol = ridge_kernel(features, y_onehot, lambda);
  return objective == OuterObjective::kClassAnchor
             ? class_anchor_loss(batch, sol.w_star, tau)
             : mse_outer_loss(batch, sol.w_star);
}

DistillState DistillState::start(SyntheticSet synthetic, std::uint64_t seed) {
  DistillState st;
  st.adam = AdamState::zeros_like(synthetic.inputs);
  st.synthetic = std::move(synthetic);
  st.batch_rng = make_stream(seed, Stream::kBatch);
  st.augment_rng = make_stream(seed, Stream::kAugment);
  return st;
}

StepMetrics distill_step(DistillState& state, const DistillConfig& cfg,
                         const Encoder& enc, const Dataset& real_features) {
  SyntheticSet& syn = state.synthetic;
  const Matrix noisy = augment(syn.inputs, cfg.augment_noise_sigma,
                               state.augment_rng);
  const OuterBatch batch =
      sample_balanced_batch(real_features, cfg.b_per_class, state.batch_rng);
  const MetaGradient mg = meta_gradient(noisy, syn.y_onehot, enc, batch,
                                        cfg.lambda, cfg.tau,
                                        cfg.outer_objective);

  StepMetrics metrics;
  metrics.loss = mg.loss;
  metrics.grad_norm = frobenius_norm(mg.grad_inputs);
  metrics.lr = cosine_lr(cfg.lr, state.iteration, cfg.iterations);

  const bool finite = std::isfinite(metrics.loss) && mg.grad_inputs.all_finite();
  if (!finite || metrics.grad_norm > kGradientAbortNorm) {
    const Matrix feats = enc.encode(noisy);
    const double mu = power_iteration_max_eig(matmul_nt(feats, feats), 200, 1);
    const double cond = (mu + cfg.lambda) / cfg.lambda;
    fail(finite ? ErrorCode::kDivergence : ErrorCode::kNonFinite,
         std::string(finite ? "gradient norm exceeded abort threshold"
                            : "non-finite loss or gradient") +
             " at iteration " + std::to_string(state.iteration) +
             " (loss=" + std::to_string(metrics.loss) +
             ", grad_norm=" + std::to_string(metrics.grad_norm) +
             ", lambda=" + std::to_string(cfg.lambda) +
             ", cond(A)~" + std::to_string(cond) + ")");
  }

  metrics.step_norm =
      adam_update(syn.inputs, mg.grad_inputs, state.adam, metrics.lr, cfg.adam);
  if (!syn.inputs.all_finite()) {
    fail(ErrorCode::kNonFinite, "synthetic inputs became non-finite at iteration " +
                                    std::to_string(state.iteration));
  }
  ++state.iteration;
  return metrics;
}

Dataset encode_dataset(const Encoder& enc, const Dataset& ds) {
  Dataset out = ds;
  out.inputs = enc.encode(ds.inputs);
  return out;
}

DistillResult run_distill(const DistillConfig& cfg, const Encoder& enc,
                          const Dataset& real, const Dataset* eval) {
  cfg.validate();
  real.validate();
  if (real.dim() != enc.input_dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "encoder input dim " + std::to_string(enc.input_dim()) +
             " does not match data dim " + std::to_string(real.dim()));
  }
  const Dataset real_features = encode_dataset(enc, real);
  const Dataset eval_features = eval ? encode_dataset(enc, *eval) : real_features;

  SyntheticSet init = init_synthetic(real.class_count, cfg.ipc, real.dim(),
                                     cfg.init, &real, cfg.seed);
  DistillState state = DistillState::start(std::move(init), cfg.seed);

  DistillResult result;
  result.curve.reserve(cfg.iterations);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const StepMetrics m = distill_step(state, cfg, enc, real_features);
    CurveRow row{t, m.loss, m.grad_norm, m.lr, std::nullopt};
    if ((t + 1) % cfg.eval_every == 0 || t + 1 == cfg.iterations) {
      const Matrix feats = enc.encode(state.synthetic.inputs);
      row.eval_acc = closed_form_probe(feats, state.synthetic.y_onehot,
                                       cfg.lambda, eval_features.inputs,
                                       eval_features.labels)
                         .eval_acc;
    }
    result.curve.push_back(row);
  }
  result.synthetic = std::move(state.synthetic);
  return result;
}

}  // namespace clpdd
