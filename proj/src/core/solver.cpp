// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/solver.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace clpdd {

namespace {

void check_problem(const Matrix& x, const Matrix& y, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::kInvalidArgument,
         "ridge coefficient must be positive, got " + std::to_string(lambda));
  }
  if (x.rows() != y.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "ridge: X has " + std::to_string(x.rows()) + " rows, Y has " +
             std::to_string(y.rows()));
  }
  if (!x.all_finite() || !y.all_finite()) {
    fail(ErrorCode::kNonFinite, "ridge: non-finite entries in X or Y");
  }
  require_one_hot(y);
}

Matrix primal_gram(const Matrix& x, double lambda) {
  return add_diagonal(matmul_tn(x, x), lambda);
}

}  // namespace

void require_one_hot(const Matrix& y) {
  for (std::size_t i = 0; i < y.rows(); ++i) {
    std::size_t ones = 0;
    for (double v : y.row(i)) {
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) {
      fail(ErrorCode::kInvalidArgument,
           "label row " + std::to_string(i) + " is not one-hot");
    }
  }
}

Matrix ridge_primal(const Matrix& x, const Matrix& y, double lambda) {
  check_problem(x, y, lambda);
  return cholesky_solve(primal_gram(x, lambda), matmul_tn(x, y));
}

ProbeSolution ridge_kernel(const Matrix& x, const Matrix& y, double lambda,
                           SolveForm form) {
  check_problem(x, y, lambda);
  if (form == SolveForm::kAuto) {
    form = x.rows() < x.cols() ? SolveForm::kKernel : SolveForm::kPrimal;
  }

  if (form == SolveForm::kKernel) {
    Cholesky factor(add_diagonal(matmul_nt(x, x), lambda));
    Matrix p = factor.solve(y);
    Matrix w = matmul_tn(x, p);
    return {std::move(w), std::move(p), std::move(factor), form, lambda};
  }

  Cholesky factor(primal_gram(x, lambda));
  Matrix w = factor.solve(matmul_tn(x, y));
  // λP = Y − XW* recovers the sample-space coefficients without an N×N solve.
  Matrix p = scale(subtract(y, matmul(x, w)), 1.0 / lambda);
  return {std::move(w), std::move(p), std::move(factor), form, lambda};
}

Matrix inner_loss_grad(const Matrix& x, const Matrix& y, double lambda,
                       const Matrix& w) {
  Matrix hw = add(matmul_tn(x, matmul(x, w)), scale(w, lambda));
  return subtract(hw, matmul_tn(x, y));
}

Matrix gd_steady_state(const Matrix& x, const Matrix& y, double lambda,
                       double eta, std::size_t steps) {
  if (!(eta > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "step size must be positive");
  }
  check_problem(x, y, lambda);
  const Matrix c = matmul_tn(x, y);
  Matrix w(x.cols(), y.cols());
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix hw = add(matmul_tn(x, matmul(x, w)), scale(w, lambda));
    auto wd = w.data();
    auto hd = hw.data();
    auto cd = c.data();
    for (std::size_t i = 0; i < wd.size(); ++i)
      wd[i] -= eta * (hd[i] - cd[i]);
  }
  return w;
}

double stable_step_bound(const Matrix& x, double lambda,
                         std::size_t power_iters) {
  if (!(lambda > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "ridge coefficient must be positive");
  }
  // XXᵀ and XᵀX share their nonzero spectrum; iterate on the smaller one.
  const Matrix gram =
      x.rows() <= x.cols() ? matmul_nt(x, x) : matmul_tn(x, x);
  const double mu = power_iteration_max_eig(gram, power_iters, 0x5eed);
  return 2.0 / (mu + lambda);
}

Matrix solve_backward(const ProbeSolution& sol, const Matrix& x,
                      const Matrix& g) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (sol.p.rows() != n || sol.w_star.rows() != d) {
    fail(ErrorCode::kDimensionMismatch,
         "solve_backward: solution does not match X of shape " +
             std::to_string(n) + "x" + std::to_string(d));
  }
  check_same_shape(g, sol.w_star, "solve_backward upstream");

  const Matrix& p = sol.p;
  if (sol.form == SolveForm::kKernel) {
    // ∇X = PGᵀ − SXG·PᵀX − P·GᵀXᵀSX, S = (XXᵀ+λI)⁻¹ applied via the factor.
    Matrix sxg = sol.factor.solve(matmul(x, g));
    Matrix grad = matmul_nt(p, g);
    grad = subtract(grad, matmul(sxg, matmul_tn(p, x)));
    grad = subtract(grad, matmul(p, matmul_tn(sxg, x)));
    return grad;
  }

  // Primal differential: dW = H⁻¹(dXᵀ(Y − XW) − XᵀdX W), Q = H⁻¹G.
  // ∇X = (Y − XW)Qᵀ − X Q Wᵀ, with Y − XW = λP.
  Matrix q = sol.factor.solve(g);
  Matrix grad = matmul_nt(scale(p, sol.lambda), q);
  grad = subtract(grad, matmul_nt(matmul(x, q), sol.w_star));
  return grad;
}

}  // namespace clpdd
