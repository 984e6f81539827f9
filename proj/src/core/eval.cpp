// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/adam.hpp"
#include "core/error.hpp"
#include "core/objective.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"

namespace clpdd {

namespace {

void check_labels(std::span<const std::size_t> labels, std::size_t rows,
                  std::size_t class_count, const char* what) {
  if (labels.size() != rows) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(rows) + " rows but " +
             std::to_string(labels.size()) + " labels");
  }
  for (std::size_t l : labels) {
    if (l >= class_count) {
      fail(ErrorCode::kLabelOutOfRange,
           std::string(what) + ": label " + std::to_string(l) +
               " out of range");
    }
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

Selection gather(const Dataset& real, std::vector<std::size_t> indices) {
  Selection sel;
  sel.set.inputs = Matrix(indices.size(), real.dim());
  sel.set.labels.resize(indices.size());
  sel.set.class_count = real.class_count;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = real.inputs.row(indices[i]);
    std::copy(src.begin(), src.end(), sel.set.inputs.row(i).begin());
    sel.set.labels[i] = real.labels[indices[i]];
  }
  sel.indices = std::move(indices);
  return sel;
}

void require_class_sizes(const std::vector<std::vector<std::size_t>>& by_class,
                         std::size_t ipc) {
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < ipc) {
      fail(ErrorCode::kInsufficientData,
           "class " + std::to_string(c) + " has " +
               std::to_string(by_class[c].size()) + " samples, need " +
               std::to_string(ipc));
    }
  }
}

}  // namespace

double probe_accuracy(const Matrix& features,
                      std::span<const std::size_t> labels, const Matrix& w) {
  if (labels.empty()) return 0.0;
  const auto pred = argmax_rows(matmul(features, w));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

ProbeResult train_linear_probe(const Matrix& train_features,
                               std::span<const std::size_t> train_labels,
                               const Matrix& eval_features,
                               std::span<const std::size_t> eval_labels,
                               std::size_t class_count,
                               const ProbeSettings& settings) {
  check_labels(train_labels, train_features.rows(), class_count, "probe train");
  check_labels(eval_labels, eval_features.rows(), class_count, "probe eval");
  if (eval_features.cols() != train_features.cols()) {
    fail(ErrorCode::kDimensionMismatch, "probe: train/eval feature dims differ");
  }
  if (settings.batch_size == 0) {
    fail(ErrorCode::kInvalidArgument, "probe batch size must be positive");
  }

  const std::size_t n = train_features.rows();
  const std::size_t d = train_features.cols();
  Rng rng = make_stream(settings.seed, Stream::kProbe);
  Matrix w = random_normal(d, class_count, settings.init_std, rng);
  AdamState adam = AdamState::zeros_like(w);
  const AdamParams hp;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::min(settings.batch_size, n);

  for (std::size_t epoch = 0; epoch < settings.epochs && n > 0; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      Matrix xb(stop - start, d);
      std::vector<std::size_t> yb(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const auto src = train_features.row(order[i]);
        std::copy(src.begin(), src.end(), xb.row(i - start).begin());
        yb[i - start] = train_labels[order[i]];
      }
      // τ = 1 class-anchor loss is plain softmax cross-entropy on x·W.
      const OuterBatch ob = OuterBatch::make(std::move(xb), std::move(yb),
                                             class_count);
      adam_update(w, class_anchor_grad_w(ob, w, 1.0), adam, settings.lr, hp);
    }
  }

  ProbeResult r;
  r.train_acc = probe_accuracy(train_features, train_labels, w);
  r.eval_acc = probe_accuracy(eval_features, eval_labels, w);
  r.epochs_run = settings.epochs;
  r.w = std::move(w);
  return r;
}

ProbeResult closed_form_probe(const Matrix& train_features,
                              const Matrix& y_onehot, double lambda,
                              const Matrix& eval_features,
                              std::span<const std::size_t> eval_labels) {
  if (eval_features.cols() != train_features.cols()) {
    fail(ErrorCode::kDimensionMismatch,
         "closed-form probe: train/eval feature dims differ");
  }
  check_labels(eval_labels, eval_features.rows(), y_onehot.cols(),
               "closed-form probe eval");
  ProbeSolution sol = ridge_kernel(train_features, y_onehot, lambda);
  const auto train_labels = argmax_rows(y_onehot);

  ProbeResult r;
  r.train_acc = probe_accuracy(train_features, train_labels, sol.w_star);
  r.eval_acc = probe_accuracy(eval_features, eval_labels, sol.w_star);
  r.w = std::move(sol.w_star);
  return r;
}

Selection select_random(const Dataset& real, std::size_t ipc,
                        std::uint64_t seed) {
  const auto by_class = real.indices_by_class();
  require_class_sizes(by_class, ipc);
  Rng rng = make_stream(seed, Stream::kSelect);
  std::vector<std::size_t> picked;
  for (auto members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    picked.insert(picked.end(), members.begin(), members.begin() + ipc);
  }
  return gather(real, std::move(picked));
}

Selection select_centroid(const Dataset& real, const Matrix& features,
                          std::size_t ipc) {
  if (features.rows() != real.size()) {
    fail(ErrorCode::kDimensionMismatch,
         "centroid selection: feature rows do not match dataset");
  }
  const auto by_class = real.indices_by_class();
  require_class_sizes(by_class, ipc);
  const std::size_t d = features.cols();

  std::vector<std::size_t> picked;
  for (const auto& members : by_class) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i : members) {
      const auto f = features.row(i);
      for (std::size_t j = 0; j < d; ++j) mean[j] += f[j];
    }
    for (double& v : mean) v /= static_cast<double>(members.size());

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(members.size());
    for (std::size_t i : members)
      ranked.emplace_back(squared_distance(features.row(i), mean), i);
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t k = 0; k < ipc; ++k) picked.push_back(ranked[k].second);
  }
  return gather(real, std::move(picked));
}

Selection select_neighbor(const Dataset& real, const Matrix& real_features,
                          const Matrix& synthetic_features,
                          std::span<const std::size_t> synthetic_labels) {
  if (real_features.rows() != real.size()) {
    fail(ErrorCode::kDimensionMismatch,
         "neighbor selection: feature rows do not match dataset");
  }
  if (synthetic_features.cols() != real_features.cols()) {
    fail(ErrorCode::kDimensionMismatch,
         "neighbor selection: synthetic and real feature dims differ");
  }
  check_labels(synthetic_labels, synthetic_features.rows(), real.class_count,
               "neighbor selection");
  const auto by_class = real.indices_by_class();

  std::vector<std::size_t> picked;
  for (std::size_t s = 0; s < synthetic_features.rows(); ++s) {
    const auto& members = by_class[synthetic_labels[s]];
    if (members.empty()) {
      fail(ErrorCode::kInsufficientData,
           "neighbor selection: class " + std::to_string(synthetic_labels[s]) +
               " has no real samples");
    }
    std::size_t best = members.front();
    double best_d = squared_distance(real_features.row(best),
                                     synthetic_features.row(s));
    for (std::size_t i : members) {
      const double dist =
          squared_distance(real_features.row(i), synthetic_features.row(s));
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    picked.push_back(best);
  }
  return gather(real, std::move(picked));
}

PcaProjection pca_project_2d(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) {
    fail(ErrorCode::kInvalidArgument, "PCA needs at least two rows");
  }

  Matrix centered = features;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += features(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) centered(i, j) -= mean;
  }
  Matrix cov = scale(matmul_tn(centered, centered),
                     1.0 / static_cast<double>(n - 1));
  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace += cov(j, j);

  PcaProjection out{Matrix(n, 2), {0.0, 0.0}};
  if (!(trace > 0.0)) return out;

  // Power iteration with Gram-Schmidt deflation against earlier components.
  constexpr std::size_t kIters = 1000;
  Rng rng(0x9ca);
  std::vector<Matrix> components;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, d); ++k) {
    Matrix v = random_normal(d, 1, 1.0, rng);
    auto orthonormalize = [&](Matrix& u) {
      for (const Matrix& prev : components) {
        const double proj = dot(u, prev);
        for (std::size_t j = 0; j < d; ++j) u(j, 0) -= proj * prev(j, 0);
      }
      const double norm = frobenius_norm(u);
      if (norm > 0.0) u = scale(u, 1.0 / norm);
      return norm;
    };
    orthonormalize(v);
    for (std::size_t it = 0; it < kIters; ++it) {
      Matrix next = matmul(cov, v);
      if (orthonormalize(next) == 0.0) break;
      v = std::move(next);
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(v(j, 0)) > 1e-12) {
        if (v(j, 0) < 0.0) v = scale(v, -1.0);
        break;
      }
    }
    const double variance = dot(v, matmul(cov, v));
    out.explained[k] = std::max(0.0, variance) / trace;
    components.push_back(std::move(v));
  }

  for (std::size_t k = 0; k < components.size(); ++k) {
    Matrix proj = matmul(centered, components[k]);
    for (std::size_t i = 0; i < n; ++i) out.coords(i, k) = proj(i, 0);
  }
  return out;
}

}  // namespace clpdd
