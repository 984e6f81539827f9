// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Drives the clpdd executable as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() /
                       ("clpdd_cli_" + std::to_string(std::random_device{}()));

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result clpdd(const std::string& args) {
  fs::create_directories(kRoot);
  const fs::path out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
  const std::string cmd = std::string("CLPDD_THREADS=1 '") + CLPDD_CLI_PATH + "' " + args +
                          " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

const std::string kFast =
    "-s iterations=50 -s eval_every=25 -s probe_epochs=20 -s n_per_class=30 -s seeds=2";

}  // namespace

TEST_CASE("gradcheck exit codes") {
  const Result ok = clpdd("gradcheck --instances 5");
  CHECK(ok.status == 0);
  CHECK(nlohmann::json::parse(ok.out)["passed"] == true);

  const Result bad = clpdd("gradcheck --instances 5 --corrupt-backward");
  CHECK(bad.status == 1);
  CHECK(bad.err.find("solve_backward") != std::string::npos);
  CHECK(bad.err.find("seed") != std::string::npos);

  const fs::path json = kRoot / "gc.json";
  const Result file = clpdd("gradcheck --instances 2 --json '" + json.string() + "'");
  CHECK(file.status == 0);
  CHECK(nlohmann::json::parse(slurp(json))["checks"].size() > 0);
}

TEST_CASE("distill reruns are byte-identical") {
  const fs::path a = kRoot / "a", b = kRoot / "b";
  REQUIRE(clpdd("distill -q " + kFast + " -o '" + a.string() + "'").status == 0);
  REQUIRE(clpdd("distill -q " + kFast + " -o '" + b.string() + "'").status == 0);
  CHECK(slurp(a / "synthetic.clpf") == slurp(b / "synthetic.clpf"));
  CHECK(slurp(a / "curve.csv") == slurp(b / "curve.csv"));
  CHECK_FALSE(slurp(a / "synthetic.clpf").empty());

  const Result ev = clpdd("eval " + kFast + " --synthetic '" + (a / "synthetic.clpf").string() +
                          "' -o '" + (kRoot / "ev").string() + "'");
  CHECK(ev.status == 0);
  CHECK(fs::exists(kRoot / "ev" / "report.json"));
}

TEST_CASE("config file and --set overrides") {
  const fs::path cfg = kRoot / "run.cfg";
  fs::create_directories(kRoot);
  std::ofstream(cfg) << "iterations=30\ntau=0.5\nprobe_epochs=10\nn_per_class=30\n";
  const fs::path out = kRoot / "o";
  REQUIRE(clpdd("distill -q -c '" + cfg.string() + "' -s tau=0.2 -o '" + out.string() + "'")
              .status == 0);
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(j["config"]["tau"] == "0.2");
  CHECK(j["config"]["iterations"] == "30");
  CHECK(j["iterations_recorded"] == 30);
}

TEST_CASE("bad input exits 2 with a message") {
  const Result bad_key = clpdd("distill -s nope=1 -o '" + (kRoot / "x").string() + "'");
  CHECK(bad_key.status == 2);
  CHECK(bad_key.err.find("nope") != std::string::npos);
  const Result bad_file =
      clpdd("eval --synthetic '" + (kRoot / "missing.clpf").string() + "' -o '" +
            (kRoot / "y").string() + "'");
  CHECK(bad_file.status == 2);
  const Result bad_param = clpdd("sweep --param ipc --values 1,2 -o '" +
                                 (kRoot / "z").string() + "'");
  CHECK(bad_param.status == 2);
}

TEST_CASE("sweep and compare") {
  const fs::path s = kRoot / "sweep";
  REQUIRE(clpdd("sweep -q " + kFast + " --param lambda --values 0.1,1 -o '" + s.string() + "'")
              .status == 0);
  const std::string csv = slurp(s / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const fs::path c = kRoot / "cmp";
  const Result r = clpdd("compare " + kFast + " -o '" + c.string() + "'");
  CHECK(r.status == 0);
  CHECK(r.out.find("clpdd") != std::string::npos);
  CHECK(fs::exists(c / "report.json"));
  fs::remove_all(kRoot);
}
