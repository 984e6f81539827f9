// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace clpdd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char* expected) {
  fail(ErrorCode::kConfig, "key '" + std::string(key) + "': cannot parse '" +
                               std::string(value) + "' as " + expected);
}

double to_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite real number");
  }
  return out;
}

std::uint64_t to_count(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "a boolean (true/false)");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CLPDD_REAL_KEY(name, field)                                        \
  Key {                                                                    \
    name,                                                                  \
        [](RunConfig& c, std::string_view k, std::string_view v) {         \
          c.field = to_real(k, v);                                         \
        },                                                                 \
        [](const RunConfig& c) { return format_real(c.field); }            \
  }
#define CLPDD_COUNT_KEY(name, field)                                       \
  Key {                                                                    \
    name,                                                                  \
        [](RunConfig& c, std::string_view k, std::string_view v) {         \
          c.field = to_count(k, v);                                        \
        },                                                                 \
        [](const RunConfig& c) { return std::to_string(c.field); }         \
  }
#define CLPDD_BOOL_KEY(name, field)                                        \
  Key {                                                                    \
    name,                                                                  \
        [](RunConfig& c, std::string_view k, std::string_view v) {         \
          c.field = to_bool(k, v);                                         \
        },                                                                 \
        [](const RunConfig& c) { return from_bool(c.field); }              \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      CLPDD_REAL_KEY("lambda", distill.lambda),
      CLPDD_REAL_KEY("tau", distill.tau),
      CLPDD_COUNT_KEY("b_per_class", distill.b_per_class),
      CLPDD_COUNT_KEY("iterations", distill.iterations),
      CLPDD_COUNT_KEY("ipc", distill.ipc),
      CLPDD_REAL_KEY("lr", distill.lr),
      Key{"lr_schedule",
          [](RunConfig&, std::string_view k, std::string_view v) {
            if (v != "cosine") bad_value(k, v, "'cosine'");
          },
          [](const RunConfig&) { return std::string("cosine"); }},
      CLPDD_REAL_KEY("adam_beta1", distill.adam.beta1),
      CLPDD_REAL_KEY("adam_beta2", distill.adam.beta2),
      CLPDD_REAL_KEY("adam_eps", distill.adam.eps),
      Key{"outer_objective",
          [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v != "class_anchor" && v != "mse") {
              bad_value(k, v, "'class_anchor' or 'mse'");
            }
            c.distill.outer_objective = parse_outer_objective(v);
          },
          [](const RunConfig& c) {
            return std::string(to_string(c.distill.outer_objective));
          }},
      Key{"encoder",
          [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v != "identity" && v != "linear" && v != "mlp1") {
              bad_value(k, v, "'identity', 'linear' or 'mlp1'");
            }
            c.distill.encoder.kind = parse_encoder_kind(v);
          },
          [](const RunConfig& c) {
            return std::string(to_string(c.distill.encoder.kind));
          }},
      CLPDD_COUNT_KEY("encoder_feature_dim", distill.encoder.feature_dim),
      CLPDD_COUNT_KEY("encoder_hidden_dim", distill.encoder.hidden_dim),
      CLPDD_COUNT_KEY("encoder_seed", distill.encoder.seed),
      CLPDD_BOOL_KEY("encoder_normalize", distill.encoder.normalize),
      CLPDD_REAL_KEY("augment_noise_sigma", distill.augment_noise_sigma),
      Key{"init",
          [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v != "random_normal" && v != "from_real") {
              bad_value(k, v, "'random_normal' or 'from_real'");
            }
            c.distill.init = parse_init_mode(v);
          },
          [](const RunConfig& c) {
            return std::string(to_string(c.distill.init));
          }},
      CLPDD_COUNT_KEY("eval_every", distill.eval_every),
      CLPDD_COUNT_KEY("seed", distill.seed),
      Key{"data",
          [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v == "blobs") {
              c.data.source = DataSource::kBlobs;
            } else if (v == "file") {
              c.data.source = DataSource::kFile;
            } else {
              bad_value(k, v, "'blobs' or 'file'");
            }
          },
          [](const RunConfig& c) {
            return std::string(c.data.source == DataSource::kBlobs ? "blobs"
                                                                   : "file");
          }},
      CLPDD_COUNT_KEY("classes", data.blobs.classes),
      CLPDD_COUNT_KEY("dim", data.blobs.dim),
      CLPDD_COUNT_KEY("n_per_class", data.blobs.n_per_class),
      CLPDD_REAL_KEY("center_scale", data.blobs.center_scale),
      CLPDD_REAL_KEY("cluster_std", data.blobs.cluster_std),
      CLPDD_BOOL_KEY("anisotropic", data.blobs.anisotropic),
      Key{"train_path",
          [](RunConfig& c, std::string_view, std::string_view v) {
            c.data.train_path = std::string(v);
          },
          [](const RunConfig& c) { return c.data.train_path; }},
      Key{"eval_path",
          [](RunConfig& c, std::string_view, std::string_view v) {
            c.data.eval_path = std::string(v);
          },
          [](const RunConfig& c) { return c.data.eval_path; }},
      CLPDD_COUNT_KEY("probe_epochs", probe.epochs),
      CLPDD_REAL_KEY("probe_lr", probe.lr),
      CLPDD_COUNT_KEY("probe_batch_size", probe.batch_size),
      CLPDD_REAL_KEY("probe_init_std", probe.init_std),
      CLPDD_COUNT_KEY("seeds", seeds),
      CLPDD_BOOL_KEY("export_pca", export_pca),
  };
  return table;
}

#undef CLPDD_REAL_KEY
#undef CLPDD_COUNT_KEY
#undef CLPDD_BOOL_KEY

const Key& find_key(std::string_view name) {
  for (const Key& k : keys())
    if (name == k.name) return k;
  fail(ErrorCode::kConfig, "unknown config key '" + std::string(name) + "'");
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void RunConfig::validate() const {
  distill.validate();
  if (seeds == 0) fail(ErrorCode::kConfig, "seeds must be >= 1");
  if (probe.batch_size == 0) fail(ErrorCode::kConfig, "probe_batch_size must be >= 1");
  if (!(probe.lr >= 0.0)) fail(ErrorCode::kConfig, "probe_lr must be non-negative");
  if (!(probe.init_std >= 0.0)) {
    fail(ErrorCode::kConfig, "probe_init_std must be non-negative");
  }
  if (data.source == DataSource::kBlobs) {
    const auto& b = data.blobs;
    if (b.classes == 0 || b.dim == 0 || b.n_per_class == 0) {
      fail(ErrorCode::kConfig, "classes, dim and n_per_class must be >= 1");
    }
    if (b.center_scale < 0.0 || b.cluster_std < 0.0) {
      fail(ErrorCode::kConfig, "center_scale and cluster_std must be >= 0");
    }
  } else if (data.train_path.empty()) {
    fail(ErrorCode::kConfig, "data=file requires train_path");
  }
}

void apply_config_value(RunConfig& cfg, std::string_view key,
                        std::string_view value) {
  key = trim(key);
  value = trim(value);
  const Key& k = find_key(key);
  try {
    k.set(cfg, key, value);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    fail(ErrorCode::kConfig, "key '" + std::string(key) + "': " + e.what());
  }
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  return find_key(trim(key)).get(cfg);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                       : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kConfig, "line " + std::to_string(line_no) +
                                   ": expected key=value, got '" +
                                   std::string(line) + "'");
    }
    try {
      apply_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorCode::kConfig,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + "=" + v + "\n";
  return out;
}

}  // namespace clpdd
