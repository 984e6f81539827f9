// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"

namespace clpdd {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

constexpr double kSymmetryTolerance = 1e-10;

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::kDimensionMismatch,
         "matrix data length " + std::to_string(data_.size()) +
             " does not match " + std::to_string(rows) + "x" +
             std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      fail(ErrorCode::kDimensionMismatch, "ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_checked(std::size_t rows, std::size_t cols,
                            std::vector<double> data) {
  Matrix m(rows, cols, std::move(data));
  if (!m.all_finite()) {
    fail(ErrorCode::kNonFinite, "matrix contains NaN or Inf");
  }
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "matmul: " + shape(a) + " times " + shape(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "matmul_tn: transpose of " + shape(a) + " times " + shape(b));
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      auto dst = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorCode::kDimensionMismatch,
         "matmul_nt: " + shape(a) + " times transpose of " + shape(b));
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto brow = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
      out(i, j) = s;
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": " + shape(a) + " vs " + shape(b));
  }
}

Matrix add(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "subtract");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Matrix add_diagonal(const Matrix& a, double s) {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::kDimensionMismatch, "add_diagonal: " + shape(a));
  }
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) out(i, i) += s;
  return out;
}

Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::kDimensionMismatch, "symmetrize: " + shape(a));
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(i, j) = 0.5 * (a(i, j) + a(j, i));
  return out;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "dot");
  double s = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::size_t> argmax_rows(const Matrix& a) {
  std::vector<std::size_t> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
      if (r[j] > r[best]) best = j;
    out[i] = best;
  }
  return out;
}

Cholesky::Cholesky(const Matrix& a_spd) {
  const std::size_t n = a_spd.rows();
  if (a_spd.cols() != n) {
    fail(ErrorCode::kDimensionMismatch, "cholesky: matrix is " + shape(a_spd));
  }
  const double scale_ref = std::max(max_abs(a_spd), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a_spd(i, j) - a_spd(j, i)) > kSymmetryTolerance * scale_ref)
        fail(ErrorCode::kInvalidArgument,
             "cholesky: matrix is not symmetric at (" + std::to_string(i) +
                 "," + std::to_string(j) + ")");

  lower_ = symmetrize(a_spd);
  Matrix& l = lower_;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = l(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      fail(ErrorCode::kNotPositiveDefinite,
           "cholesky: non-positive pivot " + std::to_string(diag) +
               " at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = l(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
    for (std::size_t c = j + 1; c < n; ++c) l(j, c) = 0.0;
  }
}

Matrix Cholesky::solve(const Matrix& b) const {
  const std::size_t n = dim();
  if (b.rows() != n) {
    fail(ErrorCode::kDimensionMismatch,
         "cholesky solve: factor is " + std::to_string(n) + "x" +
             std::to_string(n) + ", rhs is " + shape(b));
  }
  const Matrix& l = lower_;
  Matrix z = b;
  const std::size_t m = b.cols();
  // L·y = b
  for (std::size_t i = 0; i < n; ++i) {
    auto zi = z.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      auto zk = z.row(k);
      for (std::size_t c = 0; c < m; ++c) zi[c] -= lik * zk[c];
    }
    for (std::size_t c = 0; c < m; ++c) zi[c] /= l(i, i);
  }
  // Lᵀ·x = y
  for (std::size_t ii = n; ii-- > 0;) {
    auto zi = z.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      auto zk = z.row(k);
      for (std::size_t c = 0; c < m; ++c) zi[c] -= lki * zk[c];
    }
    for (std::size_t c = 0; c < m; ++c) zi[c] /= l(ii, ii);
  }
  return z;
}

Matrix cholesky_solve(const Matrix& a_spd, const Matrix& b) {
  if (b.rows() != a_spd.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "cholesky_solve: " + shape(a_spd) + " with rhs " + shape(b));
  }
  return Cholesky(a_spd).solve(b);
}

double power_iteration_max_eig(const Matrix& a_spd, std::size_t iters,
                               std::uint64_t seed) {
  const std::size_t n = a_spd.rows();
  if (a_spd.cols() != n) {
    fail(ErrorCode::kDimensionMismatch, "power iteration: " + shape(a_spd));
  }
  if (iters == 0) {
    fail(ErrorCode::kInvalidArgument, "power iteration needs iters >= 1");
  }
  if (n == 0 || max_abs(a_spd) == 0.0) return 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix v(n, 1);
  for (double& x : v.data()) x = normal(rng);

  double estimate = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const double norm = frobenius_norm(v);
    if (norm == 0.0) break;
    v = scale(v, 1.0 / norm);
    Matrix av = matmul(a_spd, v);
    estimate = std::max(estimate, dot(v, av));
    v = std::move(av);
  }
  return estimate;
}

}  // namespace clpdd
