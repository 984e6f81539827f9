// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value run configuration. Lines are `key = value`; `#` starts a
// comment. Unknown keys and malformed values are errors that name the line
// and key.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/data.hpp"
#include "core/distill.hpp"
#include "core/eval.hpp"

namespace clpdd {

enum class DataSource { kBlobs, kFile };

struct DataSpec {
  DataSource source = DataSource::kBlobs;
  BlobParams blobs{.classes = 5,
                   .dim = 16,
                   .n_per_class = 250,
                   .center_scale = 1.0,
                   .cluster_std = 2.0,
                   .anisotropic = true,
                   .seed = 0};  // seed is taken from the run seed
  std::string train_path;
  std::string eval_path;

  friend bool operator==(const DataSpec&, const DataSpec&) = default;
};

struct RunConfig {
  DistillConfig distill;
  DataSpec data;
  ProbeSettings probe;     // seed is taken from the run seed
  std::size_t seeds = 5;   // compare/sweep repetitions
  bool export_pca = false;

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Single key override, same syntax and checks as a config line.
void apply_config_value(RunConfig& cfg, std::string_view key,
                        std::string_view value);
// Reads a key back as it would be serialized.
std::string get_config_value(const RunConfig& cfg, std::string_view key);

// Ordered (key, value) pairs covering every key.
std::vector<std::pair<std::string, std::string>> config_entries(
    const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Shortest decimal that round-trips to the same double.
std::string format_real(double v);

}  // namespace clpdd
