// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form ridge probe over synthetic features and its reverse-mode
// derivative with respect to those features.
//
//   W* = (XᵀX + λI_d)⁻¹ XᵀY = Xᵀ (XXᵀ + λI_N)⁻¹ Y
//
// The kernel (N×N) system is used when N < d, the primal (d×d) one otherwise.
// Both give the same classifier; the cached factorization is reused by the
// backward pass.

#pragma once

#include <cstddef>

#include "core/linalg.hpp"

namespace clpdd {

enum class SolveForm { kAuto, kKernel, kPrimal };

struct ProbeSolution {
  Matrix w_star;  // d × C
  Matrix p;       // N × C, (XXᵀ + λI)⁻¹ Y
  Cholesky factor;  // of XXᵀ+λI (kernel) or XᵀX+λI (primal)
  SolveForm form;   // kKernel or kPrimal, never kAuto
  double lambda;
};

// (XᵀX+λI)W = XᵀY.
Matrix ridge_primal(const Matrix& x, const Matrix& y, double lambda);

ProbeSolution ridge_kernel(const Matrix& x, const Matrix& y, double lambda,
                           SolveForm form = SolveForm::kAuto);

// ∇_W of ½‖XW−Y‖² + ½λ‖W‖², i.e. HW − c.
Matrix inner_loss_grad(const Matrix& x, const Matrix& y, double lambda,
                       const Matrix& w);

// `steps` iterations of W ← W − η(HW − c) from W₀ = 0.
Matrix gd_steady_state(const Matrix& x, const Matrix& y, double lambda,
                       double eta, std::size_t steps);

// 2 / μ_max(XᵀX + λI).
double stable_step_bound(const Matrix& x, double lambda,
                         std::size_t power_iters = 1000);

// ∂L/∂X given g = ∂L/∂W*, for the X and Y that produced `sol`.
Matrix solve_backward(const ProbeSolution& sol, const Matrix& x,
                      const Matrix& g);

// Throws unless every row of y is a one-hot indicator.
void require_one_hot(const Matrix& y);

}  // namespace clpdd
