// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Frozen feature extractors. An Encoder maps learnable input rows to feature
// rows and exposes the exact vector-Jacobian product needed to carry
// feature-space gradients back to the inputs. Weights never change after
// construction.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "core/linalg.hpp"

namespace clpdd {

enum class EncoderKind { kIdentity, kLinear, kMlp1 };

std::string_view to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view name);

class Encoder {
 public:
  static Encoder identity(std::size_t dim, bool normalize = false);
  // Weights ~ N(0, 1/fan_in), drawn from `seed`.
  static Encoder linear(std::size_t input_dim, std::size_t feature_dim,
                        std::uint64_t seed, bool normalize = false);
  static Encoder mlp1(std::size_t input_dim, std::size_t hidden_dim,
                      std::size_t feature_dim, std::uint64_t seed,
                      bool normalize = false);

  // Explicit weights; biases are 1×k row vectors.
  static Encoder linear_from(Matrix weight, Matrix bias, bool normalize = false);
  static Encoder mlp1_from(Matrix w1, Matrix b1, Matrix w2, Matrix b2,
                           bool normalize = false);

  EncoderKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  bool normalizes() const noexcept { return normalize_; }

  Matrix encode(const Matrix& inputs) const;
  // J_φ(inputs)ᵀ applied row-wise to `upstream` (n × feature_dim).
  Matrix vjp(const Matrix& inputs, const Matrix& upstream) const;

 private:
  Encoder(EncoderKind kind, std::size_t input_dim, std::size_t feature_dim,
          bool normalize);

  Matrix pre_normalize(const Matrix& inputs, Matrix* hidden) const;
  void check_inputs(const Matrix& inputs) const;

  EncoderKind kind_;
  std::size_t input_dim_;
  std::size_t feature_dim_;
  bool normalize_;
  Matrix w1_, b1_, w2_, b2_;
};

inline Matrix encode(const Encoder& enc, const Matrix& inputs) {
  return enc.encode(inputs);
}
inline Matrix encode_vjp(const Encoder& enc, const Matrix& inputs,
                         const Matrix& upstream) {
  return enc.vjp(inputs, upstream);
}

}  // namespace clpdd
