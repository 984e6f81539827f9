// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "core/data.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "test_util.hpp"

using namespace clpdd;

namespace {

ErrorCode load_code(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    load_features(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kState;
}

std::string to_bytes(const Dataset& ds, Precision p) {
  std::ostringstream out;
  save_features(ds, out, p);
  return out.str();
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d,
                       std::size_t c) {
  Dataset ds;
  ds.inputs = testing::randn(n, d, rng);
  ds.class_count = c;
  std::uniform_int_distribution<std::size_t> lab(0, c - 1);
  for (std::size_t i = 0; i < n; ++i) ds.labels.push_back(lab(rng));
  return ds;
}

}  // namespace

TEST_CASE("blobs with zero spread sit on their centers") {
  BlobParams p{.classes = 2, .dim = 2, .n_per_class = 10, .cluster_std = 0.0, .seed = 3};
  const auto [train, eval] = gen_blobs(p);
  std::vector<std::vector<double>> center(2);
  for (const Dataset* ds : {&train, &eval}) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      auto& c = center[ds->labels[i]];
      const auto r = ds->inputs.row(i);
      if (c.empty()) c.assign(r.begin(), r.end());
      CHECK(std::equal(c.begin(), c.end(), r.begin()));
    }
  }
  CHECK(center[0] != center[1]);
}

TEST_CASE("blob split sizes and stratification") {
  for (std::size_t c : {2u, 3u, 5u, 7u}) {
    for (std::size_t n : {1u, 3u, 10u, 250u}) {
      BlobParams p{.classes = c, .dim = 3, .n_per_class = n, .seed = 1};
      const auto [train, eval] = gen_blobs(p);
      const std::size_t total = c * n;
      const std::size_t expect = static_cast<std::size_t>(std::ceil(0.8 * total - 1e-9));
      CHECK(train.size() == expect);
      CHECK(eval.size() == total - expect);
      CHECK(train.split == Split::kTrain);
      CHECK(eval.split == Split::kEval);
      const auto by = train.indices_by_class();
      std::size_t lo = total, hi = 0;
      for (const auto& idx : by) {
        lo = std::min(lo, idx.size());
        hi = std::max(hi, idx.size());
      }
      CHECK(hi - lo <= 1);
    }
  }
  const auto [train, eval] = gen_blobs(BlobParams{.seed = 0});
  for (const auto& idx : train.indices_by_class()) CHECK(idx.size() == 200);
}

TEST_CASE("blobs are deterministic per seed") {
  for (bool aniso : {false, true}) {
    BlobParams p{.classes = 3, .dim = 4, .n_per_class = 20, .anisotropic = aniso, .seed = 9};
    CHECK(gen_blobs(p) == gen_blobs(p));
    BlobParams q = p;
    q.seed = 10;
    CHECK_FALSE(gen_blobs(p).first == gen_blobs(q).first);
  }
}

TEST_CASE("well separated blobs are solved by the closed-form probe") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BlobParams p{.center_scale = 10.0, .cluster_std = 1.0, .seed = seed};
    const auto [train, eval] = gen_blobs(p);
    const ProbeResult r = closed_form_probe(train.inputs, train.one_hot(), 0.1,
                                            eval.inputs, eval.labels);
    CHECK(r.eval_acc >= 0.99);
  }
}

TEST_CASE("CLPF byte layout") {
  Dataset ds;
  ds.inputs = Matrix{{1.5, -2.0}};
  ds.labels = {2};
  ds.class_count = 3;
  const std::string b = to_bytes(ds, Precision::kF64);
  REQUIRE(b.size() == 4 + 2 + 2 + 8 + 8 + 4 + 4 + 16);
  CHECK(b.substr(0, 4) == "CLPF");
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK(b[6] == 0);  // flags: f64
  CHECK(b[8] == 1);  // n
  CHECK(b[16] == 2);  // dim
  CHECK(b[24] == 3);  // class_count
  CHECK(b[28] == 2);  // label
  double v;
  std::memcpy(&v, b.data() + 32, 8);
  CHECK(v == 1.5);
  const std::string f = to_bytes(ds, Precision::kF32);
  CHECK(f.size() == 32 + 8);
  CHECK(f[6] == 1);
  float fv;
  std::memcpy(&fv, f.data() + 36, 4);
  CHECK(fv == -2.0f);
}

TEST_CASE("CLPF round trips at stored precision") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 200; ++t) {
    const Dataset ds = random_dataset(rng, t % 9, 1 + t % 5, 1 + t % 4);
    {
      std::istringstream in(to_bytes(ds, Precision::kF64));
      CHECK(load_features(in) == ds);
    }
    std::istringstream in(to_bytes(ds, Precision::kF32));
    const Dataset back = load_features(in);
    Dataset narrowed = ds;
    for (double& v : narrowed.inputs.data()) v = static_cast<float>(v);
    CHECK(back == narrowed);
  }
}

TEST_CASE("CLPF error fixtures map to distinct codes") {
  std::mt19937_64 rng(62);
  const Dataset ds = random_dataset(rng, 4, 3, 2);
  const std::string good = to_bytes(ds, Precision::kF64);

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(load_code(bad_magic) == ErrorCode::kBadMagic);

  std::string bad_version = good;
  bad_version[4] = 2;
  CHECK(load_code(bad_version) == ErrorCode::kVersionMismatch);

  for (std::size_t cut : {0u, 2u, 6u, 20u, 30u, 40u}) {
    CHECK(load_code(good.substr(0, cut)) == ErrorCode::kTruncated);
  }
  CHECK(load_code(good.substr(0, good.size() - 1)) == ErrorCode::kTruncated);

  std::string bad_label = good;
  bad_label[28] = 7;  // first label, class_count is 2
  CHECK(load_code(bad_label) == ErrorCode::kLabelOutOfRange);

  std::string huge = good;
  for (int i = 8; i < 16; ++i) huge[i] = static_cast<char>(0xff);
  CHECK(load_code(huge) == ErrorCode::kTruncated);

  std::string nan_payload = good;
  const double nan = std::nan("");
  std::memcpy(nan_payload.data() + 44 + 16, &nan, 8);
  CHECK(load_code(nan_payload) == ErrorCode::kNonFinite);
}

TEST_CASE("CSV twin parses to the same dataset as the binary file") {
  std::mt19937_64 rng(63);
  const Dataset ds = random_dataset(rng, 12, 4, 3);
  const auto dir = testing::scratch_dir("csv");
  save_features(ds, dir / "a.clpf");
  save_features(ds, dir / "a.csv");
  Dataset from_bin = load_features(dir / "a.clpf");
  Dataset from_csv = load_features(dir / "a.csv");
  CHECK(from_bin == ds);
  // A CSV does not carry the class count; it is inferred from the labels.
  from_csv.class_count = ds.class_count;
  CHECK(from_csv == from_bin);

  std::ifstream head(dir / "a.csv");
  std::string line;
  std::getline(head, line);
  CHECK(line == "label,f0,f1,f2,f3");
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV parse errors") {
  auto code = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_features_csv(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kState;
  };
  CHECK(code("") == ErrorCode::kTruncated);
  CHECK(code("x,f0\n0,1\n") == ErrorCode::kBadMagic);
  CHECK(code("label,f0,f1\n0,1\n") == ErrorCode::kTruncated);
  CHECK(code("label,f0\n-1,1\n") == ErrorCode::kLabelOutOfRange);
  CHECK(code("label,f0\n0,abc\n") == ErrorCode::kTruncated);
  std::istringstream ok("label,f0\n1,2.5\n0,-1\n");
  const Dataset ds = load_features_csv(ok, 4);
  CHECK(ds.class_count == 4);
  CHECK(ds.labels == std::vector<std::size_t>{1, 0});
}

TEST_CASE("missing files report an io error") {
  try {
    load_features(std::filesystem::path("/nonexistent/definitely/missing.clpf"));
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}
