// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference battery for every analytic gradient in the library.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace clpdd {

// Central differences of a scalar function, entry by entry.
Matrix numeric_gradient(const std::function<double(const Matrix&)>& f,
                        const Matrix& at, double h);

// max|analytic − numeric| / max(max|numeric|, max|analytic|, 1e-8).
double max_rel_error(const Matrix& analytic, const Matrix& numeric);

struct GradcheckOptions {
  std::size_t instances = 50;
  double h = 1e-5;
  double threshold = 1e-5;
  std::uint64_t seed = 0;
  double tau = 0.07;
  // Negative control: perturbs the analytic solve backward by 1%.
  bool corrupt_backward = false;
};

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  bool passed = true;
  std::size_t worst_instance = 0;
  std::uint64_t worst_seed = 0;
};

struct GradcheckReport {
  std::vector<CheckResult> checks;
  GradcheckOptions options;
  double seconds = 0.0;

  bool passed() const;
  std::string to_json() const;
};

GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace clpdd
