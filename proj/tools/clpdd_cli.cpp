// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// clpdd command-line front end. Talks to the engine only through clpdd.h.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "clpdd.h"

namespace {

struct StringDeleter {
  void operator()(char* s) const { clpdd_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ConfigDeleter {
  void operator()(clpdd_config* c) const { clpdd_config_destroy(c); }
};
using OwnedConfig = std::unique_ptr<clpdd_config, ConfigDeleter>;

struct CommandError {
  clpdd_status status;
  std::string message;
};

void check(clpdd_status status) {
  if (status != CLPDD_OK) throw CommandError{status, clpdd_last_error()};
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("-c,--config", c.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", c.overrides,
                  "override a config key, e.g. --set lambda=0.5 (repeatable)")
      ->type_name("KEY=VALUE");
  if (with_out) {
    cmd->add_option("-o,--out", c.out_dir, "output directory")
        ->capture_default_str();
  }
  cmd->add_flag("-q,--quiet", c.quiet, "do not print the report");
}

OwnedConfig build_config(const Common& c) {
  clpdd_config* raw = nullptr;
  if (c.config_path.empty()) {
    check(clpdd_config_create(&raw));
  } else {
    check(clpdd_config_load(c.config_path.c_str(), &raw));
  }
  OwnedConfig cfg(raw);
  for (const std::string& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CommandError{CLPDD_ERR_CONFIG,
                         "--set expects KEY=VALUE, got '" + kv + "'"};
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const clpdd_status st = clpdd_config_set(cfg.get(), key.c_str(), value.c_str());
    if (st != CLPDD_OK) {
      throw CommandError{st, std::string("--set ") + clpdd_last_error()};
    }
  }
  return cfg;
}

void print_summary(const std::string& report_json, bool quiet) {
  if (quiet) return;
  const auto j = nlohmann::ordered_json::parse(report_json);
  for (const char* block : {"accuracies", "closed_form_accuracies"}) {
    if (!j.contains(block) || j[block].empty()) continue;
    std::cout << (std::string(block) == "accuracies" ? "probe accuracy"
                                                     : "closed-form accuracy")
              << ":\n";
    for (const auto& [name, s] : j[block].items()) {
      std::printf("  %-14s %.4f +- %.4f\n", name.c_str(),
                  s["mean"].get<double>(), s["std"].get<double>());
    }
  }
  if (j.contains("final_outer_loss")) {
    std::printf("outer loss: %.6g -> %.6g over %zu iterations\n",
                j["initial_outer_loss"].get<double>(),
                j["final_outer_loss"].get<double>(),
                j["iterations_recorded"].get<std::size_t>());
  }
  std::printf("wall clock: %.2f s\n", j["wall_clock_seconds"].get<double>());
}

int run_gradcheck(const Common& c, std::size_t instances, bool corrupt,
                  const std::string& json_path) {
  OwnedConfig cfg = build_config(c);
  char* seed_text = nullptr;
  check(clpdd_config_get(cfg.get(), "seed", &seed_text));
  const std::uint64_t seed = std::stoull(OwnedString(seed_text).get());

  int passed = 0;
  char* raw = nullptr;
  check(clpdd_gradcheck(seed, instances, corrupt ? 1 : 0, &passed, &raw));
  OwnedString json(raw);
  const auto j = nlohmann::ordered_json::parse(json.get());

  if (!json_path.empty()) {
    std::FILE* f = std::fopen(json_path.c_str(), "wb");
    if (!f) throw CommandError{CLPDD_ERR_IO, "cannot write " + json_path};
    std::fputs(json.get(), f);
    std::fclose(f);
  }
  if (c.quiet) {
    // Nothing on stdout but failures.
  } else if (json_path.empty()) {
    std::cout << json.get() << '\n';
  } else {
    for (const auto& chk : j["checks"]) {
      std::printf("%-34s %s  max_rel_error=%.3e\n",
                  chk["name"].get<std::string>().c_str(),
                  chk["passed"].get<bool>() ? "ok  " : "FAIL",
                  chk["max_rel_error"].get<double>());
    }
  }
  if (passed) return 0;
  for (const auto& chk : j["checks"]) {
    if (chk["passed"].get<bool>()) continue;
    std::fprintf(stderr,
                 "gradcheck failed: %s max_rel_error=%.3e at instance %zu "
                 "(seed %llu, stream %llu)\n",
                 chk["name"].get<std::string>().c_str(),
                 chk["max_rel_error"].get<double>(),
                 chk["worst_instance"].get<std::size_t>(),
                 static_cast<unsigned long long>(seed),
                 chk["worst_instance_seed"].get<unsigned long long>());
  }
  return 1;
}

std::vector<std::string> split_values(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const std::string& item : raw) {
    std::stringstream ss(item);
    std::string v;
    while (std::getline(ss, v, ',')) {
      if (!v.empty()) out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form linear-probe dataset distillation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", clpdd_version());

  Common common;

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference check of every analytic gradient");
  add_common(gradcheck, common, false);
  std::size_t instances = 50;
  bool corrupt = false;
  std::string json_path;
  gradcheck->add_option("--instances", instances, "random instances per check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gradcheck->add_option("--json", json_path,
                        "write the JSON report here and print a table");
  gradcheck->add_flag("--corrupt-backward", corrupt,
                      "perturb the solve backward (negative control)");

  auto* distill = app.add_subcommand("distill", "distill a synthetic set");
  add_common(distill, common);

  auto* eval = app.add_subcommand("eval", "score a synthetic set with the probe");
  add_common(eval, common);
  std::string synthetic;
  eval->add_option("--synthetic", synthetic, "synthetic set (.clpf or .csv)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand(
      "compare", "distilled set vs selection baselines over several seeds");
  add_common(compare, common);

  auto* sweep = app.add_subcommand("sweep", "compare across parameter values");
  add_common(sweep, common);
  std::string param;
  std::vector<std::string> raw_values;
  sweep->add_option("--param", param, "tau, lambda or b_per_class")->required();
  sweep->add_option("--values", raw_values, "comma or space separated values")
      ->required();

  auto* embed = app.add_subcommand(
      "export-embeddings", "2-D PCA of real and synthetic features");
  add_common(embed, common);
  std::string embed_synthetic;
  embed->add_option("--synthetic", embed_synthetic,
                    "existing synthetic set; distills first when omitted")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error exits 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gradcheck) return run_gradcheck(common, instances, corrupt, json_path);

    OwnedConfig cfg = build_config(common);
    const char* out = common.out_dir.c_str();
    char* raw = nullptr;
    if (*distill) {
      check(clpdd_distill(cfg.get(), out, &raw));
      print_summary(OwnedString(raw).get(), common.quiet);
    } else if (*eval) {
      check(clpdd_eval(cfg.get(), synthetic.c_str(), out, &raw));
      print_summary(OwnedString(raw).get(), common.quiet);
    } else if (*compare) {
      check(clpdd_compare(cfg.get(), out, &raw));
      print_summary(OwnedString(raw).get(), common.quiet);
    } else if (*sweep) {
      const std::vector<std::string> values = split_values(raw_values);
      std::vector<const char*> ptrs;
      for (const auto& v : values) ptrs.push_back(v.c_str());
      check(clpdd_sweep(cfg.get(), param.c_str(), ptrs.data(), ptrs.size(), out,
                        &raw));
      OwnedString csv(raw);
      if (!common.quiet) std::cout << csv.get();
    } else if (*embed) {
      check(clpdd_export_embeddings(cfg.get(), embed_synthetic.c_str(), out));
      if (!common.quiet) std::cout << "wrote " << common.out_dir << "/embeddings.csv\n";
    }
  } catch (const CommandError& e) {
    std::cerr << "clpdd: " << clpdd_status_name(e.status) << ": " << e.message
              << '\n';
    return 2;
  }
  return 0;
}
