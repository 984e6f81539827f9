// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "core/linalg.hpp"

namespace clpdd {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const AdamParams&, const AdamParams&) = default;
};

struct AdamState {
  Matrix m;
  Matrix v;
  std::uint64_t step = 0;

  static AdamState zeros_like(const Matrix& param) {
    return {Matrix(param.rows(), param.cols()),
            Matrix(param.rows(), param.cols()), 0};
  }
};

// In-place bias-corrected Adam update; returns the Frobenius norm of the
// applied step.
inline double adam_update(Matrix& param, const Matrix& grad, AdamState& state,
                          double lr, const AdamParams& hp) {
  check_same_shape(param, grad, "adam");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hp.beta1, t);
  const double c2 = 1.0 - std::pow(hp.beta2, t);
  auto p = param.data();
  auto g = grad.data();
  auto m = state.m.data();
  auto v = state.v.data();
  double step_sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
    v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g[i] * g[i];
    const double delta = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + hp.eps);
    p[i] -= delta;
    step_sq += delta * delta;
  }
  return std::sqrt(step_sq);
}

}  // namespace clpdd
