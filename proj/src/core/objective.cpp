// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace clpdd {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    fail(ErrorCode::kInvalidArgument,
         "temperature must be positive, got " + std::to_string(tau));
  }
}

void check_batch(const OuterBatch& batch, const Matrix& w_star) {
  if (batch.x_real.cols() != w_star.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "outer loss: features have " + std::to_string(batch.x_real.cols()) +
             " columns, probe has " + std::to_string(w_star.rows()) + " rows");
  }
  if (batch.t_onehot.cols() != w_star.cols() ||
      batch.t_onehot.rows() != batch.x_real.rows()) {
    fail(ErrorCode::kDimensionMismatch, "outer loss: target shape mismatch");
  }
  if (batch.size() == 0) {
    fail(ErrorCode::kInvalidArgument, "outer loss: empty batch");
  }
}

}  // namespace

OuterBatch OuterBatch::make(Matrix x_real, std::vector<std::size_t> labels,
                            std::size_t class_count) {
  if (labels.size() != x_real.rows()) {
    fail(ErrorCode::kDimensionMismatch, "outer batch: label count mismatch");
  }
  Matrix t(labels.size(), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      fail(ErrorCode::kLabelOutOfRange,
           "outer batch: label " + std::to_string(labels[i]) +
               " out of range");
    }
    t(i, labels[i]) = 1.0;
  }
  return {std::move(x_real), std::move(labels), std::move(t)};
}

std::string_view to_string(OuterObjective o) {
  return o == OuterObjective::kClassAnchor ? "class_anchor" : "mse";
}

OuterObjective parse_outer_objective(std::string_view name) {
  if (name == "class_anchor") return OuterObjective::kClassAnchor;
  if (name == "mse") return OuterObjective::kMse;
  fail(ErrorCode::kInvalidArgument,
       "unknown outer objective '" + std::string(name) + "'");
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    const double m = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (double& v : r) {
      v = std::exp(v - m);
      z += v;
    }
    for (double& v : r) v /= z;
  }
  return out;
}

LossAndGrad class_anchor(const OuterBatch& batch, const Matrix& w_star,
                         double tau) {
  check_tau(tau);
  check_batch(batch, w_star);
  Matrix z = scale(matmul(batch.x_real, w_star), 1.0 / tau);
  const std::size_t m = batch.size();

  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto r = z.row(i);
    const auto top = std::max_element(r.begin(), r.end());
    const double mx = *top;
    double rest = 0.0;
    for (auto it = r.begin(); it != r.end(); ++it)
      if (it != top) rest += std::exp(*it - mx);
    loss += (mx - r[batch.labels[i]]) + std::log1p(rest);
  }
  loss /= static_cast<double>(m);

  Matrix resid = subtract(softmax_rows(z), batch.t_onehot);
  Matrix grad = scale(matmul_tn(batch.x_real, resid),
                      1.0 / (static_cast<double>(m) * tau));
  return {loss, std::move(grad)};
}

double class_anchor_loss(const OuterBatch& batch, const Matrix& w_star,
                         double tau) {
  return class_anchor(batch, w_star, tau).loss;
}

Matrix class_anchor_grad_w(const OuterBatch& batch, const Matrix& w_star,
                           double tau) {
  return class_anchor(batch, w_star, tau).grad_w;
}

LossAndGrad mse_outer(const OuterBatch& batch, const Matrix& w_star) {
  check_batch(batch, w_star);
  const double m = static_cast<double>(batch.size());
  Matrix resid = subtract(matmul(batch.x_real, w_star), batch.t_onehot);
  const double loss = dot(resid, resid) / (2.0 * m);
  return {loss, scale(matmul_tn(batch.x_real, resid), 1.0 / m)};
}

double mse_outer_loss(const OuterBatch& batch, const Matrix& w_star) {
  return mse_outer(batch, w_star).loss;
}

Matrix mse_outer_grad_w(const OuterBatch& batch, const Matrix& w_star) {
  return mse_outer(batch, w_star).grad_w;
}

LossAndGrad outer_loss(OuterObjective objective, const OuterBatch& batch,
                       const Matrix& w_star, double tau) {
  if (objective == OuterObjective::kClassAnchor) {
    return class_anchor(batch, w_star, tau);
  }
  return mse_outer(batch, w_star);
}

}  // namespace clpdd
