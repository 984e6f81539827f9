// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "core/distill.hpp"
#include "core/encoder.hpp"
#include "core/objective.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"

namespace clpdd {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Row i belongs to class i % C, so every class appears once N ≥ C.
Matrix cyclic_one_hot(std::size_t n, std::size_t c) {
  Matrix y(n, c);
  for (std::size_t i = 0; i < n; ++i) y(i, i % c) = 1.0;
  return y;
}

std::vector<std::size_t> cyclic_labels(std::size_t n, std::size_t c) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i % c;
  return out;
}

double pick_lambda(Rng& rng) {
  static constexpr double kLambdas[] = {0.01, 0.1, 1.0};
  return kLambdas[uniform(rng, 0, 2)];
}

struct Pair {
  Matrix analytic;
  Matrix numeric;
};

using InstanceFn = std::function<Pair(Rng&, const GradcheckOptions&)>;

Matrix apply_corruption(Matrix g, const GradcheckOptions& opt) {
  return opt.corrupt_backward ? scale(g, 1.01) : g;
}

Pair solver_instance(Rng& rng, const GradcheckOptions& opt, bool kernel) {
  std::size_t n, d;
  if (kernel) {
    n = uniform(rng, 1, 5);
    d = uniform(rng, n + 1, n + 6);
  } else {
    d = uniform(rng, 1, 5);
    n = uniform(rng, d, d + 5);
  }
  const std::size_t c = uniform(rng, 1, 4);
  const double lambda = pick_lambda(rng);
  const Matrix x = random_normal(n, d, 1.0, rng);
  const Matrix y = cyclic_one_hot(n, c);
  const Matrix g = random_normal(d, c, 1.0, rng);

  const ProbeSolution sol = ridge_kernel(
      x, y, lambda, kernel ? SolveForm::kKernel : SolveForm::kPrimal);
  Matrix analytic = apply_corruption(solve_backward(sol, x, g), opt);
  // Forward through the other algebraic route.
  auto f = [&](const Matrix& xp) { return dot(g, ridge_primal(xp, y, lambda)); };
  return {std::move(analytic), numeric_gradient(f, x, opt.h)};
}

OuterBatch random_batch(Rng& rng, std::size_t c, std::size_t b,
                        std::size_t d) {
  const std::size_t m = c * b;
  return OuterBatch::make(random_normal(m, d, 1.0, rng), cyclic_labels(m, c),
                          c);
}

Pair objective_instance(Rng& rng, const GradcheckOptions& opt, bool anchor) {
  static constexpr double kTaus[] = {0.07, 0.5, 1.0};
  const std::size_t c = uniform(rng, 2, 5);
  const std::size_t b = uniform(rng, 1, 4);
  const std::size_t d = uniform(rng, 2, 8);
  const double tau = kTaus[uniform(rng, 0, 2)];
  const OuterBatch batch = random_batch(rng, c, b, d);
  const Matrix w = random_normal(d, c, 0.1, rng);
  if (anchor) {
    auto f = [&](const Matrix& wp) { return class_anchor_loss(batch, wp, tau); };
    return {class_anchor_grad_w(batch, w, tau), numeric_gradient(f, w, opt.h)};
  }
  auto f = [&](const Matrix& wp) { return mse_outer_loss(batch, wp); };
  return {mse_outer_grad_w(batch, w), numeric_gradient(f, w, opt.h)};
}

Encoder random_encoder(Rng& rng, EncoderKind kind, std::size_t input_dim,
                       std::size_t feature_dim, bool normalize) {
  const std::uint64_t seed = rng();
  switch (kind) {
    case EncoderKind::kIdentity:
      return Encoder::identity(input_dim, normalize);
    case EncoderKind::kLinear:
      return Encoder::linear(input_dim, feature_dim, seed, normalize);
    case EncoderKind::kMlp1:
      return Encoder::mlp1(input_dim, uniform(rng, 1, 6), feature_dim, seed,
                           normalize);
  }
  return Encoder::identity(input_dim);
}

Pair encoder_instance(Rng& rng, const GradcheckOptions& opt, EncoderKind kind,
                      bool normalize) {
  const std::size_t n = uniform(rng, 1, 4);
  const std::size_t din = uniform(rng, 1, 6);
  // A normalized 1-d feature is a constant ±1 with zero gradient everywhere;
  // only the FD rounding would be compared.
  const std::size_t dout = kind == EncoderKind::kIdentity
                               ? din
                               : uniform(rng, normalize ? 2 : 1, 6);
  const Encoder enc = random_encoder(rng, kind, din, dout, normalize);
  const Matrix x = random_normal(n, din, 1.0, rng);
  const Matrix u = random_normal(n, dout, 1.0, rng);
  auto f = [&](const Matrix& xp) { return dot(u, enc.encode(xp)); };
  return {enc.vjp(x, u), numeric_gradient(f, x, opt.h)};
}

Pair pipeline_instance(Rng& rng, const GradcheckOptions& opt, EncoderKind kind,
                       OuterObjective objective) {
  const std::size_t c = uniform(rng, 2, 3);
  const std::size_t ipc = uniform(rng, 1, 2);
  const std::size_t n = c * ipc;
  const std::size_t din = uniform(rng, 2, 7);
  const std::size_t dout =
      kind == EncoderKind::kIdentity ? din : uniform(rng, 2, 7);
  const Encoder enc = random_encoder(rng, kind, din, dout, false);
  const double lambda = pick_lambda(rng);
  const Matrix inputs = random_normal(n, din, 1.0, rng);
  Matrix y(n, c);
  for (std::size_t i = 0; i < n; ++i) y(i, i / ipc) = 1.0;
  const OuterBatch batch = random_batch(rng, c, uniform(rng, 1, 3), dout);

  Matrix analytic;
  if (opt.corrupt_backward) {
    // Same composition as meta_gradient, with the solve backward perturbed.
    const Matrix feats = enc.encode(inputs);
    const ProbeSolution sol = ridge_kernel(feats, y, lambda);
    const LossAndGrad outer = outer_loss(objective, batch, sol.w_star, opt.tau);
    analytic = enc.vjp(
        inputs, apply_corruption(solve_backward(sol, feats, outer.grad_w), opt));
  } else {
    analytic = meta_gradient(inputs, y, enc, batch, lambda, opt.tau, objective)
                   .grad_inputs;
  }
  auto f = [&](const Matrix& s) {
    return meta_loss(s, y, enc, batch, lambda, opt.tau, objective);
  };
  return {std::move(analytic), numeric_gradient(f, inputs, opt.h)};
}

struct Check {
  const char* name;
  InstanceFn fn;
};

std::vector<Check> battery() {
  using EK = EncoderKind;
  using OO = OuterObjective;
  auto solver = [](bool kernel) {
    return [kernel](Rng& r, const GradcheckOptions& o) {
      return solver_instance(r, o, kernel);
    };
  };
  auto objective = [](bool anchor) {
    return [anchor](Rng& r, const GradcheckOptions& o) {
      return objective_instance(r, o, anchor);
    };
  };
  auto encoder = [](EK kind, bool normalize) {
    return [kind, normalize](Rng& r, const GradcheckOptions& o) {
      return encoder_instance(r, o, kind, normalize);
    };
  };
  auto pipeline = [](EK kind, OO obj) {
    return [kind, obj](Rng& r, const GradcheckOptions& o) {
      return pipeline_instance(r, o, kind, obj);
    };
  };
  return {
      {"solve_backward_kernel", solver(true)},
      {"solve_backward_primal", solver(false)},
      {"class_anchor_grad_w", objective(true)},
      {"mse_outer_grad_w", objective(false)},
      {"encoder_vjp_identity", encoder(EK::kIdentity, false)},
      {"encoder_vjp_linear", encoder(EK::kLinear, false)},
      {"encoder_vjp_mlp1", encoder(EK::kMlp1, false)},
      {"encoder_vjp_linear_normalized", encoder(EK::kLinear, true)},
      {"encoder_vjp_mlp1_normalized", encoder(EK::kMlp1, true)},
      {"pipeline_identity_class_anchor", pipeline(EK::kIdentity, OO::kClassAnchor)},
      {"pipeline_linear_class_anchor", pipeline(EK::kLinear, OO::kClassAnchor)},
      {"pipeline_mlp1_class_anchor", pipeline(EK::kMlp1, OO::kClassAnchor)},
      {"pipeline_identity_mse", pipeline(EK::kIdentity, OO::kMse)},
  };
}

}  // namespace

Matrix numeric_gradient(const std::function<double(const Matrix&)>& f,
                        const Matrix& at, double h) {
  Matrix grad(at.rows(), at.cols());
  Matrix probe = at;
  auto p = probe.data();
  auto g = grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = f(probe);
    p[i] = orig - h;
    const double down = f(probe);
    p[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_rel_error(const Matrix& analytic, const Matrix& numeric) {
  check_same_shape(analytic, numeric, "max_rel_error");
  const double denom =
      std::max({max_abs(numeric), max_abs(analytic), 1e-8});
  return max_abs(subtract(analytic, numeric)) / denom;
}

bool GradcheckReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string GradcheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  j["threshold"] = options.threshold;
  j["h"] = options.h;
  j["instances_per_check"] = options.instances;
  j["seed"] = options.seed;
  j["corrupt_backward"] = options.corrupt_backward;
  j["seconds"] = seconds;
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["instances"] = c.instances;
    cj["max_rel_error"] = c.max_rel_error;
    cj["passed"] = c.passed;
    cj["worst_instance"] = c.worst_instance;
    cj["worst_instance_seed"] = c.worst_seed;
    j["checks"].push_back(std::move(cj));
  }
  return j.dump(2);
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  GradcheckReport report;
  report.options = options;
  const auto checks = battery();
  for (std::size_t ci = 0; ci < checks.size(); ++ci) {
    CheckResult result;
    result.name = checks[ci].name;
    result.instances = options.instances;
    for (std::size_t i = 0; i < options.instances; ++i) {
      const auto stream_index = static_cast<std::uint32_t>(ci * 100000 + i);
      Rng rng = make_stream(options.seed, Stream::kGradcheck, stream_index);
      const Pair pair = checks[ci].fn(rng, options);
      const double err = max_rel_error(pair.analytic, pair.numeric);
      const bool worse = i == 0 || std::isnan(err) ||
                         (!std::isnan(result.max_rel_error) &&
                          err > result.max_rel_error);
      if (worse) {
        result.max_rel_error = err;
        result.worst_instance = i;
        result.worst_seed = stream_index;
      }
    }
    result.passed = result.max_rel_error <= options.threshold;
    report.checks.push_back(std::move(result));
  }
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace clpdd
