// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Outer objectives scoring a probe W* on real features.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "core/linalg.hpp"

namespace clpdd {

struct OuterBatch {
  Matrix x_real;                     // M × d
  std::vector<std::size_t> labels;   // length M
  Matrix t_onehot;                   // M × C

  static OuterBatch make(Matrix x_real, std::vector<std::size_t> labels,
                         std::size_t class_count);
  std::size_t size() const noexcept { return labels.size(); }
};

enum class OuterObjective { kClassAnchor, kMse };

std::string_view to_string(OuterObjective o);
OuterObjective parse_outer_objective(std::string_view name);

struct LossAndGrad {
  double loss;
  Matrix grad_w;  // d × C
};

// Mean of −log softmax(x·W*/τ)[label].
double class_anchor_loss(const OuterBatch& batch, const Matrix& w_star,
                         double tau);
// (1/(Mτ)) X_realᵀ(Π − T).
Matrix class_anchor_grad_w(const OuterBatch& batch, const Matrix& w_star,
                           double tau);
LossAndGrad class_anchor(const OuterBatch& batch, const Matrix& w_star,
                         double tau);

// (1/(2M))‖X_real·W* − T‖²_F and its gradient (1/M) X_realᵀ(X_real·W* − T).
double mse_outer_loss(const OuterBatch& batch, const Matrix& w_star);
Matrix mse_outer_grad_w(const OuterBatch& batch, const Matrix& w_star);
LossAndGrad mse_outer(const OuterBatch& batch, const Matrix& w_star);

LossAndGrad outer_loss(OuterObjective objective, const OuterBatch& batch,
                       const Matrix& w_star, double tau);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

}  // namespace clpdd
