// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/report.hpp"
#include "test_util.hpp"

using namespace clpdd;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(get_config_value(cfg, "lambda") == "0.1");
  CHECK(get_config_value(cfg, "tau") == "0.07");
  CHECK(get_config_value(cfg, "b_per_class") == "4");
  CHECK(get_config_value(cfg, "lr") == "0.05");
  CHECK(get_config_value(cfg, "lr_schedule") == "cosine");
  CHECK(get_config_value(cfg, "probe_epochs") == "500");
  CHECK(get_config_value(cfg, "probe_lr") == "0.01");
  CHECK(get_config_value(cfg, "iterations") == "1000");
  CHECK(get_config_value(cfg, "seeds") == "5");
  CHECK(parse_config("") == cfg);
  cfg.validate();
}

TEST_CASE("serialization round trips") {
  RunConfig cfg;
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  apply_config_value(cfg, "lambda", "0.3");
  apply_config_value(cfg, "tau", "0.123456789012345");
  apply_config_value(cfg, "encoder", "mlp1");
  apply_config_value(cfg, "encoder_feature_dim", "8");
  apply_config_value(cfg, "outer_objective", "mse");
  apply_config_value(cfg, "init", "from_real");
  apply_config_value(cfg, "data", "file");
  apply_config_value(cfg, "train_path", "/tmp/x y.clpf");
  apply_config_value(cfg, "export_pca", "true");
  apply_config_value(cfg, "seed", "18446744073709551615");
  const RunConfig back = parse_config(serialize_config(cfg));
  CHECK(back == cfg);
  CHECK(back.distill.tau == 0.123456789012345);
  CHECK(back.data.train_path == "/tmp/x y.clpf");
  CHECK(back.distill.seed == 18446744073709551615ull);

  // The report's config echo re-parses to the same config.
  RunReport r;
  r.config = cfg;
  const auto j = nlohmann::json::parse(r.to_json());
  std::string text;
  for (const auto& [k, v] : j["config"].items()) text += k + "=" + v.get<std::string>() + "\n";
  CHECK(parse_config(text) == cfg);
}

TEST_CASE("comments, blanks and whitespace") {
  const RunConfig cfg = parse_config(
      "# header\n\n  lambda = 0.5   # trailing\n\ttau=1\r\nipc=2\n");
  CHECK(cfg.distill.lambda == 0.5);
  CHECK(cfg.distill.tau == 1.0);
  CHECK(cfg.distill.ipc == 2);
}

TEST_CASE("errors name the line and the key") {
  const std::string a = config_error("lambda=0.1\ntau=abc\n");
  CHECK(a.find("line 2") != std::string::npos);
  CHECK(a.find("tau") != std::string::npos);
  const std::string b = config_error("\n\nbogus=1\n");
  CHECK(b.find("line 3") != std::string::npos);
  CHECK(b.find("bogus") != std::string::npos);
  CHECK(config_error("lambda\n").find("line 1") != std::string::npos);
  CHECK(config_error("iterations=-3\n").find("iterations") != std::string::npos);
  CHECK(config_error("encoder=vit\n").find("encoder") != std::string::npos);
  CHECK(config_error("lr_schedule=step\n").find("lr_schedule") != std::string::npos);
  CHECK(config_error("anisotropic=maybe\n").find("anisotropic") != std::string::npos);
  CHECK(config_error("lambda=1e999\n").find("lambda") != std::string::npos);
}

TEST_CASE("semantic validation") {
  RunConfig cfg;
  apply_config_value(cfg, "lambda", "0");
  CHECK_THROWS_AS(cfg.validate(), Error);
  RunConfig f;
  apply_config_value(f, "data", "file");
  CHECK_THROWS_AS(f.validate(), Error);
  RunConfig s;
  apply_config_value(s, "seeds", "0");
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("load_config reports the path") {
  const auto dir = testing::scratch_dir("cfg");
  {
    std::ofstream(dir / "a.cfg") << "lambda=0.2\n";
    std::ofstream(dir / "b.cfg") << "tau=\n";
  }
  CHECK(load_config(dir / "a.cfg").distill.lambda == 0.2);
  try {
    load_config(dir / "b.cfg");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("b.cfg") != std::string::npos);
  }
  try {
    load_config(dir / "missing.cfg");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_real is shortest round-trip") {
  for (double v : {0.1, 0.07, 1e-8, 1.0 / 3.0, 123456.789, -2.5, 0.0}) {
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0) == "1");
}
