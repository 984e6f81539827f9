// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Oracles shared by the unit tests. Deliberately naive and independent of the
// library's own helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "core/linalg.hpp"

namespace clpdd::testing {

inline Matrix randn(std::size_t r, std::size_t c, std::mt19937_64& rng,
                    double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline Matrix naive_transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double fro(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double fro_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      s += d * d;
    }
  return std::sqrt(s);
}

inline double rel_fro(const Matrix& a, const Matrix& ref) {
  return fro_diff(a, ref) / std::max(fro(ref), 1e-300);
}

inline double max_abs_entry(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

// Central differences, entry by entry.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f,
                          const Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix p = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = p(i, j);
      p(i, j) = v + h;
      const double up = f(p);
      p(i, j) = v - h;
      const double dn = f(p);
      p(i, j) = v;
      g(i, j) = (up - dn) / (2.0 * h);
    }
  return g;
}

// max|a − f| / max(max|f|, max|a|, 1e-8)
inline double grad_rel_error(const Matrix& analytic, const Matrix& fd) {
  double num = 0.0;
  for (std::size_t i = 0; i < fd.rows(); ++i)
    for (std::size_t j = 0; j < fd.cols(); ++j)
      num = std::max(num, std::abs(analytic(i, j) - fd(i, j)));
  return num /
         std::max({max_abs_entry(fd), max_abs_entry(analytic), 1e-8});
}

inline double frob_inner(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  return s;
}

inline Matrix one_hot_cyclic(std::size_t n, std::size_t c) {
  Matrix y(n, c);
  for (std::size_t i = 0; i < n; ++i) y(i, i % c) = 1.0;
  return y;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() /
                 ("clpdd_test_" + name + "_" +
                  std::to_string(std::random_device{}()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace clpdd::testing
