// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "clpdd.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "core/app.hpp"
#include "core/config.hpp"
#include "core/data.hpp"
#include "core/error.hpp"
#include "core/gradcheck.hpp"

struct clpdd_config {
  clpdd::RunConfig cfg;
};

struct clpdd_dataset {
  clpdd::Dataset ds;
};

namespace {

thread_local std::string g_last_error;

clpdd_status set_error(clpdd_status status, const char* msg) {
  g_last_error = msg;
  return status;
}

// Runs fn and maps any escaping exception onto a status code.
template <typename Fn>
clpdd_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return CLPDD_OK;
  } catch (const clpdd::Error& e) {
    return set_error(static_cast<clpdd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CLPDD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CLPDD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CLPDD_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (!p) {
    clpdd::fail(clpdd::ErrorCode::kInvalidArgument,
                std::string(what) + " must not be NULL");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* clpdd_version(void) { return "0.1.0"; }

const char* clpdd_status_name(clpdd_status status) {
  switch (status) {
    case CLPDD_OK: return "ok";
    case CLPDD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CLPDD_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case CLPDD_ERR_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case CLPDD_ERR_NON_FINITE: return "non_finite";
    case CLPDD_ERR_CONFIG: return "config";
    case CLPDD_ERR_IO: return "io";
    case CLPDD_ERR_BAD_MAGIC: return "bad_magic";
    case CLPDD_ERR_VERSION_MISMATCH: return "version_mismatch";
    case CLPDD_ERR_TRUNCATED: return "truncated";
    case CLPDD_ERR_LABEL_OUT_OF_RANGE: return "label_out_of_range";
    case CLPDD_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case CLPDD_ERR_DIVERGENCE: return "divergence";
    case CLPDD_ERR_STATE: return "state";
    case CLPDD_ERR_GRADCHECK_FAILED: return "gradcheck_failed";
    case CLPDD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* clpdd_last_error(void) { return g_last_error.c_str(); }

void clpdd_string_free(char* s) { std::free(s); }

clpdd_status clpdd_config_create(clpdd_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new clpdd_config{};
  });
}

clpdd_status clpdd_config_parse(const char* text, clpdd_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new clpdd_config{clpdd::parse_config(text)};
  });
}

clpdd_status clpdd_config_load(const char* path, clpdd_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new clpdd_config{clpdd::load_config(path)};
  });
}

clpdd_status clpdd_config_set(clpdd_config* cfg, const char* key,
                              const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    clpdd::apply_config_value(cfg->cfg, key, value);
  });
}

clpdd_status clpdd_config_get(const clpdd_config* cfg, const char* key,
                              char** value_out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value_out, "value_out");
    *value_out = dup_string(clpdd::get_config_value(cfg->cfg, key));
  });
}

clpdd_status clpdd_config_serialize(const clpdd_config* cfg, char** text_out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(text_out, "text_out");
    *text_out = dup_string(clpdd::serialize_config(cfg->cfg));
  });
}

void clpdd_config_destroy(clpdd_config* cfg) { delete cfg; }

clpdd_status clpdd_dataset_create(size_t n, size_t dim, size_t class_count,
                                  const double* inputs, const uint32_t* labels,
                                  clpdd_dataset** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(inputs, "inputs");
      require(labels, "labels");
    }
    clpdd::Dataset ds;
    ds.inputs = clpdd::Matrix::from_checked(
        n, dim, std::vector<double>(inputs, inputs + n * dim));
    ds.labels.assign(labels, labels + n);
    ds.class_count = class_count;
    ds.validate();
    *out = new clpdd_dataset{std::move(ds)};
  });
}

clpdd_status clpdd_dataset_generate(const clpdd_config* cfg, uint64_t seed,
                                    clpdd_dataset** train_out,
                                    clpdd_dataset** eval_out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(train_out, "train_out");
    require(eval_out, "eval_out");
    clpdd::BlobParams p = cfg->cfg.data.blobs;
    p.seed = seed;
    auto [train, eval] = clpdd::gen_blobs(p);
    auto* t = new clpdd_dataset{std::move(train)};
    try {
      *eval_out = new clpdd_dataset{std::move(eval)};
    } catch (...) {
      delete t;
      throw;
    }
    *train_out = t;
  });
}

clpdd_status clpdd_dataset_load(const char* path, clpdd_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new clpdd_dataset{clpdd::load_features(std::filesystem::path(path))};
  });
}

clpdd_status clpdd_dataset_save(const clpdd_dataset* ds, const char* path,
                                int single_precision) {
  return guarded([&] {
    require(ds, "ds");
    require(path, "path");
    clpdd::save_features(ds->ds, std::filesystem::path(path),
                         single_precision ? clpdd::Precision::kF32
                                          : clpdd::Precision::kF64);
  });
}

clpdd_status clpdd_dataset_info(const clpdd_dataset* ds, size_t* n,
                                size_t* dim, size_t* class_count) {
  return guarded([&] {
    require(ds, "ds");
    if (n) *n = ds->ds.size();
    if (dim) *dim = ds->ds.dim();
    if (class_count) *class_count = ds->ds.class_count;
  });
}

clpdd_status clpdd_dataset_copy(const clpdd_dataset* ds, double* inputs,
                                uint32_t* labels) {
  return guarded([&] {
    require(ds, "ds");
    if (inputs) {
      const auto src = ds->ds.inputs.data();
      std::copy(src.begin(), src.end(), inputs);
    }
    if (labels) {
      for (std::size_t i = 0; i < ds->ds.labels.size(); ++i)
        labels[i] = static_cast<uint32_t>(ds->ds.labels[i]);
    }
  });
}

void clpdd_dataset_destroy(clpdd_dataset* ds) { delete ds; }

clpdd_status clpdd_gradcheck(uint64_t seed, size_t instances,
                             int corrupt_backward, int* passed,
                             char** report_json) {
  return guarded([&] {
    require(passed, "passed");
    if (instances == 0) {
      clpdd::fail(clpdd::ErrorCode::kInvalidArgument,
                  "gradcheck needs at least one instance");
    }
    clpdd::GradcheckOptions opt;
    opt.seed = seed;
    opt.instances = instances;
    opt.corrupt_backward = corrupt_backward != 0;
    const clpdd::GradcheckReport report = clpdd::run_gradcheck(opt);
    *passed = report.passed() ? 1 : 0;
    emit(report_json, report.to_json());
  });
}

clpdd_status clpdd_distill(const clpdd_config* cfg, const char* out_dir,
                           char** report_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    emit(report_json, clpdd::cmd_distill(cfg->cfg, out_dir).to_json());
  });
}

clpdd_status clpdd_eval(const clpdd_config* cfg, const char* synthetic_path,
                        const char* out_dir, char** report_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(synthetic_path, "synthetic_path");
    require(out_dir, "out_dir");
    emit(report_json,
         clpdd::cmd_eval(cfg->cfg, synthetic_path, out_dir).to_json());
  });
}

clpdd_status clpdd_compare(const clpdd_config* cfg, const char* out_dir,
                           char** report_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    emit(report_json, clpdd::cmd_compare(cfg->cfg, out_dir).to_json());
  });
}

clpdd_status clpdd_sweep(const clpdd_config* cfg, const char* param,
                         const char* const* values, size_t count,
                         const char* out_dir, char** csv_out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(param, "param");
    require(out_dir, "out_dir");
    if (count > 0) require(values, "values");
    std::vector<std::string> vals;
    for (size_t i = 0; i < count; ++i) {
      require(values[i], "values[i]");
      vals.emplace_back(values[i]);
    }
    emit(csv_out, clpdd::cmd_sweep(cfg->cfg, param, vals, out_dir));
  });
}

clpdd_status clpdd_export_embeddings(const clpdd_config* cfg,
                                     const char* synthetic_path,
                                     const char* out_dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    clpdd::cmd_export_embeddings(
        cfg->cfg, synthetic_path ? synthetic_path : "", out_dir);
  });
}

}  // extern "C"
