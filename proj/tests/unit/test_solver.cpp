// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "core/error.hpp"
#include "core/solver.hpp"
#include "test_util.hpp"

using namespace clpdd;
using clpdd::testing::one_hot_cyclic;
using clpdd::testing::randn;
using clpdd::testing::rel_fro;

namespace {

// μ_max(XᵀX + λI) by dense eigendecomposition.
double eigen_hessian_max(const Matrix& x, double lambda) {
  Eigen::MatrixXd e(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) e(i, j) = x(i, j);
  Eigen::MatrixXd h = e.transpose() * e;
  h.diagonal().array() += lambda;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
}

// Dense normal-equation reference via Eigen's LDLT, independent of the
// library's Cholesky.
Matrix eigen_ridge(const Matrix& x, const Matrix& y, double lambda) {
  Eigen::MatrixXd ex(x.rows(), x.cols()), ey(y.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) ex(i, j) = x(i, j);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) ey(i, j) = y(i, j);
  Eigen::MatrixXd h = ex.transpose() * ex;
  h.diagonal().array() += lambda;
  const Eigen::MatrixXd w = h.ldlt().solve(ex.transpose() * ey);
  Matrix out(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) out(i, j) = w(i, j);
  return out;
}

}  // namespace

TEST_CASE("ridge_primal examples") {
  CHECK(rel_fro(ridge_primal(Matrix::identity(2), Matrix::identity(2), 1.0),
                scale(Matrix::identity(2), 0.5)) <= 1e-15);
  CHECK(ridge_primal(Matrix(3, 4), one_hot_cyclic(3, 2), 0.1) == Matrix(4, 2));

  std::mt19937_64 rng(21);
  const Matrix x = randn(5, 12, rng);
  const Matrix y = one_hot_cyclic(5, 3);
  const Matrix w = ridge_primal(x, y, 0.1);
  CHECK(testing::fro(inner_loss_grad(x, y, 0.1, w)) <= 1e-9);
  CHECK(rel_fro(w, eigen_ridge(x, y, 0.1)) <= 1e-10);
}

TEST_CASE("ridge rejects bad problems") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kState;
  };
  const Matrix x = Matrix::identity(2);
  const Matrix y = Matrix::identity(2);
  CHECK(code([&] { ridge_primal(x, y, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code([&] { ridge_kernel(x, y, -1.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code([&] { ridge_kernel(x, Matrix(3, 2), 1.0); }) ==
        ErrorCode::kDimensionMismatch);
  Matrix bad = x;
  bad(0, 0) = std::nan("");
  CHECK(code([&] { ridge_primal(bad, y, 1.0); }) == ErrorCode::kNonFinite);
  CHECK(code([&] { require_one_hot(Matrix{{1.0, 1.0}}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code([&] { require_one_hot(Matrix{{0.5, 0.5}}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("ridge_kernel examples") {
  const ProbeSolution s = ridge_kernel(Matrix::identity(2), Matrix::identity(2), 1.0);
  CHECK(rel_fro(s.w_star, scale(Matrix::identity(2), 0.5)) <= 1e-15);
  CHECK(rel_fro(s.p, scale(Matrix::identity(2), 0.5)) <= 1e-15);

  std::mt19937_64 rng(22);
  const Matrix x = randn(5, 64, rng);
  const Matrix y = one_hot_cyclic(5, 3);
  const ProbeSolution k = ridge_kernel(x, y, 0.1);
  CHECK(k.form == SolveForm::kKernel);
  CHECK(rel_fro(k.w_star, ridge_primal(x, y, 0.1)) <= 1e-10);

  // N = 1: W* = xᵀ/(‖x‖² + λ) in the label column.
  const Matrix x1{{1.0, -2.0, 0.5}};
  const Matrix y1{{0.0, 1.0}};
  const ProbeSolution one = ridge_kernel(x1, y1, 0.3);
  const double denom = 1.0 + 4.0 + 0.25 + 0.3;
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(one.w_star(j, 0) == 0.0);
    CHECK(one.w_star(j, 1) == doctest::Approx(x1(0, j) / denom).epsilon(1e-14));
  }
}

TEST_CASE("ProbeSolution invariants hold in both forms") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + t % 7, d = 1 + (t * 5) % 9;
    const Matrix x = randn(n, d, rng);
    const Matrix y = one_hot_cyclic(n, 3);
    const ProbeSolution s = ridge_kernel(x, y, 0.1);
    const Matrix a = add_diagonal(testing::naive_matmul(x, testing::naive_transpose(x)), 0.1);
    CHECK(rel_fro(testing::naive_matmul(a, s.p), y) <= 1e-9);
    CHECK(rel_fro(testing::naive_matmul(testing::naive_transpose(x), s.p), s.w_star) <=
          1e-9);
    CHECK(s.form == (n < d ? SolveForm::kKernel : SolveForm::kPrimal));
  }
}

TEST_CASE("primal and kernel agree across shapes and ridge coefficients") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const bool wide = t % 2 == 0;
    const std::size_t n = wide ? 1 + t % 6 : 4 + t % 9;
    const std::size_t d = wide ? n + 1 + t % 10 : 1 + t % 4;
    const double lambda = std::array{0.01, 0.1, 1.0}[t % 3];
    const Matrix x = randn(n, d, rng);
    const Matrix y = one_hot_cyclic(n, 1 + t % 4);
    const Matrix wp = ridge_primal(x, y, lambda);
    const Matrix wk = ridge_kernel(x, y, lambda, SolveForm::kKernel).w_star;
    CHECK(rel_fro(wk, wp) <= 1e-9);
    CHECK(rel_fro(ridge_kernel(x, y, lambda, SolveForm::kPrimal).w_star, wp) <= 1e-12);
  }
}

TEST_CASE("stationarity of the closed form") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 30; ++t) {
    const Matrix x = randn(2 + t % 6, 1 + t % 11, rng);
    const Matrix y = one_hot_cyclic(x.rows(), 3);
    const ProbeSolution s = ridge_kernel(x, y, 0.1);
    const Matrix c = testing::naive_matmul(testing::naive_transpose(x), y);
    CHECK(testing::fro(inner_loss_grad(x, y, 0.1, s.w_star)) <=
          1e-9 * std::max(testing::fro(c), 1.0));
  }
}

TEST_CASE("scale covariance: X -> aX, lambda -> a^2 lambda gives W*/a") {
  std::mt19937_64 rng(26);
  const Matrix x = randn(4, 7, rng);
  const Matrix y = one_hot_cyclic(4, 2);
  const Matrix w = ridge_kernel(x, y, 0.1).w_star;
  // α = 2 is a power of two, so every intermediate scales exactly.
  const Matrix w2 = ridge_kernel(scale(x, 2.0), y, 0.4).w_star;
  CHECK(w2 == scale(w, 0.5));
  const Matrix wp = ridge_primal(x, y, 0.1);
  CHECK(ridge_primal(scale(x, 2.0), y, 0.4) == scale(wp, 0.5));
}

TEST_CASE("gd_steady_state one-step case") {
  const Matrix w = gd_steady_state(Matrix::identity(2), Matrix::identity(2), 1.0, 0.5, 1);
  CHECK(w == scale(Matrix::identity(2), 0.5));
  CHECK(gd_steady_state(Matrix::identity(2), Matrix::identity(2), 1.0, 0.5, 0) ==
        Matrix(2, 2));
}

TEST_CASE("gd converges at 1/mu_max and diverges at 2.5/mu_max") {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 20; ++t) {
    const Matrix x = randn(3 + t % 5, 2 + t % 4, rng);
    const Matrix y = one_hot_cyclic(x.rows(), 2);
    const double lambda = std::array{0.01, 0.1, 1.0}[t % 3];
    const Matrix w_star = ridge_primal(x, y, lambda);
    const double mu = eigen_hessian_max(x, lambda);
    CHECK(rel_fro(gd_steady_state(x, y, lambda, 1.0 / mu, 5000), w_star) <= 1e-6);
    CHECK(testing::fro(gd_steady_state(x, y, lambda, 2.5 / mu, 200)) >
          1e3 * testing::fro(w_star));
  }
}

TEST_CASE("gd error is monotone below the stability bound") {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 10; ++t) {
    const Matrix x = randn(6, 4, rng);
    const Matrix y = one_hot_cyclic(6, 3);
    const double lambda = 0.1;
    const Matrix w_star = ridge_primal(x, y, lambda);
    const double eta = 0.9 * stable_step_bound(x, lambda);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s <= 60; ++s) {
      const double err = testing::fro_diff(gd_steady_state(x, y, lambda, eta, s), w_star);
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("stable_step_bound examples and eigensolver agreement") {
  CHECK(stable_step_bound(Matrix(3, 4), 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stable_step_bound(Matrix::identity(2), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const Matrix x = randn(2 + t % 9, 2 + (3 * t) % 8, rng);
    const double ref = 2.0 / eigen_hessian_max(x, 0.1);
    CHECK(std::abs(stable_step_bound(x, 0.1) - ref) / ref <= 1e-5);
  }
}

TEST_CASE("solve_backward examples") {
  std::mt19937_64 rng(30);
  const Matrix x = randn(4, 6, rng);
  const Matrix y = one_hot_cyclic(4, 3);
  const ProbeSolution s = ridge_kernel(x, y, 0.1);
  CHECK(solve_backward(s, x, Matrix(6, 3)) == Matrix(4, 6));

  // Scalar stationary point: dW*/dx = (1 − x²)/(1 + x²)² = 0 at x = 1.
  const Matrix one{{1.0}};
  const ProbeSolution s1 = ridge_kernel(one, one, 1.0);
  CHECK(std::abs(solve_backward(s1, one, Matrix{{3.7}})(0, 0)) <= 1e-15);

  CHECK_THROWS_AS(solve_backward(s, randn(3, 6, rng), Matrix(6, 3)), Error);
  CHECK_THROWS_AS(solve_backward(s, x, Matrix(5, 3)), Error);
}

TEST_CASE("solve_backward matches finite differences (N=4, d=6, C=3)") {
  std::mt19937_64 rng(31);
  const Matrix x = randn(4, 6, rng);
  const Matrix y = one_hot_cyclic(4, 3);
  const Matrix g = randn(6, 3, rng);
  const Matrix analytic = solve_backward(ridge_kernel(x, y, 0.1), x, g);
  const Matrix fd = testing::fd_gradient(
      [&](const Matrix& xp) {
        return testing::frob_inner(g, ridge_kernel(xp, y, 0.1).w_star);
      },
      x);
  CHECK(testing::grad_rel_error(analytic, fd) <= 1e-6);
}

TEST_CASE("solve_backward finite-difference battery, both forms") {
  std::mt19937_64 rng(32);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    for (const SolveForm form : {SolveForm::kKernel, SolveForm::kPrimal}) {
      const std::size_t n = 1 + t % 5;
      const std::size_t d = form == SolveForm::kKernel ? n + 1 + t % 4 : 1 + t % n;
      const double lambda = std::array{0.01, 0.1, 1.0}[t % 3];
      const Matrix x = randn(n, d, rng);
      const Matrix y = one_hot_cyclic(n, 1 + t % 3);
      const Matrix g = randn(d, y.cols(), rng);
      const Matrix analytic = solve_backward(ridge_kernel(x, y, lambda, form), x, g);
      const Matrix fd = testing::fd_gradient(
          [&](const Matrix& xp) {
            return testing::frob_inner(g, ridge_primal(xp, y, lambda));
          },
          x);
      worst = std::max(worst, testing::grad_rel_error(analytic, fd));
    }
  }
  CHECK(worst <= 1e-5);
}
