// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "core/linalg.hpp"

namespace clpdd {

using Rng = std::mt19937_64;

// Independent per-purpose streams derived from one run seed, so a change in
// how much one stage draws never shifts another stage's numbers.
enum class Stream : std::uint32_t {
  kData = 1,
  kEncoder = 2,
  kInit = 3,
  kBatch = 4,
  kAugment = 5,
  kProbe = 6,
  kSelect = 7,
  kGradcheck = 8,
};

inline Rng make_stream(std::uint64_t seed, Stream stream,
                       std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), index};
  return Rng(seq);
}

inline Matrix random_normal(std::size_t rows, std::size_t cols, double stddev,
                            Rng& rng) {
  Matrix m(rows, cols);
  if (stddev == 0.0) return m;
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

}  // namespace clpdd
