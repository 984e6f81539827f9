// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/encoder.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace clpdd {

namespace {

Matrix add_row_bias(Matrix m, const Matrix& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
  return m;
}

void require_bias(const Matrix& bias, std::size_t width, const char* what) {
  if (bias.rows() != 1 || bias.cols() != width) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": bias must be 1x" + std::to_string(width));
  }
}

}  // namespace

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kIdentity: return "identity";
    case EncoderKind::kLinear: return "linear";
    case EncoderKind::kMlp1: return "mlp1";
  }
  return "unknown";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "identity") return EncoderKind::kIdentity;
  if (name == "linear") return EncoderKind::kLinear;
  if (name == "mlp1") return EncoderKind::kMlp1;
  fail(ErrorCode::kInvalidArgument,
       "unknown encoder kind '" + std::string(name) + "'");
}

Encoder::Encoder(EncoderKind kind, std::size_t input_dim,
                 std::size_t feature_dim, bool normalize)
    : kind_(kind),
      input_dim_(input_dim),
      feature_dim_(feature_dim),
      normalize_(normalize) {}

Encoder Encoder::identity(std::size_t dim, bool normalize) {
  return Encoder(EncoderKind::kIdentity, dim, dim, normalize);
}

Encoder Encoder::linear(std::size_t input_dim, std::size_t feature_dim,
                        std::uint64_t seed, bool normalize) {
  if (input_dim == 0 || feature_dim == 0) {
    fail(ErrorCode::kInvalidArgument, "linear encoder needs nonzero dims");
  }
  Rng rng = make_stream(seed, Stream::kEncoder);
  const double sd = 1.0 / std::sqrt(static_cast<double>(input_dim));
  Matrix w = random_normal(input_dim, feature_dim, sd, rng);
  Matrix b = random_normal(1, feature_dim, sd, rng);
  return linear_from(std::move(w), std::move(b), normalize);
}

Encoder Encoder::mlp1(std::size_t input_dim, std::size_t hidden_dim,
                      std::size_t feature_dim, std::uint64_t seed,
                      bool normalize) {
  if (input_dim == 0 || hidden_dim == 0 || feature_dim == 0) {
    fail(ErrorCode::kInvalidArgument, "mlp1 encoder needs nonzero dims");
  }
  Rng rng = make_stream(seed, Stream::kEncoder);
  const double sd1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double sd2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  Matrix w1 = random_normal(input_dim, hidden_dim, sd1, rng);
  Matrix b1 = random_normal(1, hidden_dim, sd1, rng);
  Matrix w2 = random_normal(hidden_dim, feature_dim, sd2, rng);
  Matrix b2 = random_normal(1, feature_dim, sd2, rng);
  return mlp1_from(std::move(w1), std::move(b1), std::move(w2), std::move(b2),
                   normalize);
}

Encoder Encoder::linear_from(Matrix weight, Matrix bias, bool normalize) {
  require_bias(bias, weight.cols(), "linear encoder");
  Encoder e(EncoderKind::kLinear, weight.rows(), weight.cols(), normalize);
  e.w1_ = std::move(weight);
  e.b1_ = std::move(bias);
  return e;
}

Encoder Encoder::mlp1_from(Matrix w1, Matrix b1, Matrix w2, Matrix b2,
                           bool normalize) {
  require_bias(b1, w1.cols(), "mlp1 encoder layer 1");
  require_bias(b2, w2.cols(), "mlp1 encoder layer 2");
  if (w1.cols() != w2.rows()) {
    fail(ErrorCode::kDimensionMismatch, "mlp1 encoder: hidden widths differ");
  }
  Encoder e(EncoderKind::kMlp1, w1.rows(), w2.cols(), normalize);
  e.w1_ = std::move(w1);
  e.b1_ = std::move(b1);
  e.w2_ = std::move(w2);
  e.b2_ = std::move(b2);
  return e;
}

void Encoder::check_inputs(const Matrix& inputs) const {
  if (inputs.cols() != input_dim_) {
    fail(ErrorCode::kDimensionMismatch,
         "encoder expects " + std::to_string(input_dim_) +
             " input columns, got " + std::to_string(inputs.cols()));
  }
}

// Features before optional row normalization; `hidden` receives tanh
// activations for mlp1.
Matrix Encoder::pre_normalize(const Matrix& inputs, Matrix* hidden) const {
  switch (kind_) {
    case EncoderKind::kIdentity:
      return inputs;
    case EncoderKind::kLinear:
      return add_row_bias(matmul(inputs, w1_), b1_);
    case EncoderKind::kMlp1: {
      Matrix h = add_row_bias(matmul(inputs, w1_), b1_);
      for (double& v : h.data()) v = std::tanh(v);
      Matrix out = add_row_bias(matmul(h, w2_), b2_);
      if (hidden) *hidden = std::move(h);
      return out;
    }
  }
  return inputs;
}

Matrix Encoder::encode(const Matrix& inputs) const {
  check_inputs(inputs);
  Matrix f = pre_normalize(inputs, nullptr);
  if (normalize_) {
    for (std::size_t i = 0; i < f.rows(); ++i) {
      auto r = f.row(i);
      double n2 = 0.0;
      for (double v : r) n2 += v * v;
      if (n2 == 0.0) continue;
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : r) v *= inv;
    }
  }
  return f;
}

Matrix Encoder::vjp(const Matrix& inputs, const Matrix& upstream) const {
  check_inputs(inputs);
  if (upstream.rows() != inputs.rows() || upstream.cols() != feature_dim_) {
    fail(ErrorCode::kDimensionMismatch,
         "encoder vjp: upstream must be " + std::to_string(inputs.rows()) +
             "x" + std::to_string(feature_dim_));
  }

  Matrix hidden;
  Matrix grad = upstream;
  if (normalize_) {
    // y = f/|f|  =>  ∂/∂f = (u − y⟨y,u⟩)/|f|
    Matrix f = pre_normalize(inputs, nullptr);
    for (std::size_t i = 0; i < f.rows(); ++i) {
      auto fr = f.row(i);
      auto gr = grad.row(i);
      double n2 = 0.0;
      for (double v : fr) n2 += v * v;
      if (n2 == 0.0) continue;
      const double norm = std::sqrt(n2);
      double yu = 0.0;
      for (std::size_t j = 0; j < fr.size(); ++j) yu += fr[j] / norm * gr[j];
      for (std::size_t j = 0; j < fr.size(); ++j)
        gr[j] = (gr[j] - fr[j] / norm * yu) / norm;
    }
  }

  switch (kind_) {
    case EncoderKind::kIdentity:
      return grad;
    case EncoderKind::kLinear:
      return matmul_nt(grad, w1_);
    case EncoderKind::kMlp1: {
      pre_normalize(inputs, &hidden);
      Matrix gh = matmul_nt(grad, w2_);
      auto h = hidden.data();
      auto g = gh.data();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - h[i] * h[i];
      return matmul_nt(gh, w1_);
    }
  }
  return grad;
}

}  // namespace clpdd
