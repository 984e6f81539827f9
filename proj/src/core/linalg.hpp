// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major double-precision linear algebra. Everything numeric in the
// library is built on these few routines; results depend only on inputs and
// operation order, never on threading.

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace clpdd {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  // Rejects NaN/Inf entries; use for anything that came from a user.
  static Matrix from_checked(std::size_t rows, std::size_t cols,
                             std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a·bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
// a + s·I, a square.
Matrix add_diagonal(const Matrix& a, double s);
Matrix symmetrize(const Matrix& a);

double frobenius_norm(const Matrix& a);
double dot(const Matrix& a, const Matrix& b);  // ⟨a, b⟩_F
double max_abs(const Matrix& a);
void check_same_shape(const Matrix& a, const Matrix& b, const char* what);

// Column index of each row's maximum; ties go to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& a);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Input is symmetrized before factoring; asymmetry beyond 1e-10 relative is
// rejected.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a_spd);

  std::size_t dim() const noexcept { return lower_.rows(); }
  // Z with A·Z = b.
  Matrix solve(const Matrix& b) const;
  const Matrix& lower() const noexcept { return lower_; }

 private:
  Matrix lower_;
};

Matrix cholesky_solve(const Matrix& a_spd, const Matrix& b);

// Rayleigh-quotient estimate of the largest eigenvalue of a symmetric PSD
// matrix after `iters` power steps from a seeded random start.
double power_iteration_max_eig(const Matrix& a_spd, std::size_t iters,
                               std::uint64_t seed);

}  // namespace clpdd
