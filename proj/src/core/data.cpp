// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace clpdd {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'L', 'P', 'F'};
constexpr std::uint16_t kFlagF32 = 0x1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in, const char* field) {
  std::array<unsigned char, sizeof(T)> buf;
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    fail(ErrorCode::kTruncated,
         std::string("CLPF truncated while reading ") + field);
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool has_csv_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}

}  // namespace

std::vector<std::vector<std::size_t>> Dataset::indices_by_class() const {
  std::vector<std::vector<std::size_t>> out(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

Matrix Dataset::one_hot() const {
  Matrix y(labels.size(), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) y(i, labels[i]) = 1.0;
  return y;
}

void Dataset::validate() const {
  if (inputs.rows() != labels.size()) {
    fail(ErrorCode::kDimensionMismatch,
         "dataset has " + std::to_string(inputs.rows()) + " rows but " +
             std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      fail(ErrorCode::kLabelOutOfRange,
           "label " + std::to_string(labels[i]) + " at row " +
               std::to_string(i) + " is outside [0, " +
               std::to_string(class_count) + ")");
    }
  }
  if (!inputs.all_finite()) {
    fail(ErrorCode::kNonFinite, "dataset contains NaN or Inf");
  }
}

std::pair<Dataset, Dataset> gen_blobs(const BlobParams& p) {
  if (p.classes == 0 || p.dim == 0 || p.n_per_class == 0) {
    fail(ErrorCode::kInvalidArgument, "blob counts must be at least 1");
  }
  if (p.center_scale < 0.0 || p.cluster_std < 0.0) {
    fail(ErrorCode::kInvalidArgument, "blob scales must be non-negative");
  }
  Rng rng = make_stream(p.seed, Stream::kData);
  const std::size_t c = p.classes;
  const std::size_t n = p.n_per_class;
  const std::size_t d = p.dim;

  Matrix centers = random_normal(c, d, p.center_scale, rng);
  std::vector<Matrix> mixing;
  if (p.anisotropic) {
    const double sd = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t k = 0; k < c; ++k)
      mixing.push_back(random_normal(d, d, sd, rng));
  }

  // Per-class sample blocks, generated class by class.
  std::vector<Matrix> samples;
  for (std::size_t k = 0; k < c; ++k) {
    Matrix noise = random_normal(n, d, 1.0, rng);
    if (p.anisotropic) noise = matmul_nt(noise, mixing[k]);
    Matrix block(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        block(i, j) = centers(k, j) + p.cluster_std * noise(i, j);
    samples.push_back(std::move(block));
  }

  const std::size_t total = c * n;
  const std::size_t n_train = (8 * total + 9) / 10;  // ⌈0.8·total⌉
  std::vector<std::size_t> train_per_class(c, n_train / c);
  for (std::size_t k = 0; k < n_train % c; ++k) ++train_per_class[k];

  std::vector<std::pair<std::size_t, std::size_t>> train_rows, eval_rows;
  for (std::size_t k = 0; k < c; ++k) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n; ++i)
      (i < train_per_class[k] ? train_rows : eval_rows)
          .emplace_back(k, order[i]);
  }
  std::shuffle(train_rows.begin(), train_rows.end(), rng);
  std::shuffle(eval_rows.begin(), eval_rows.end(), rng);

  auto assemble = [&](const auto& rows, Split split) {
    Dataset ds;
    ds.inputs = Matrix(rows.size(), d);
    ds.labels.resize(rows.size());
    ds.class_count = c;
    ds.split = split;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto [k, r] = rows[i];
      std::copy_n(samples[k].row(r).begin(), d, ds.inputs.row(i).begin());
      ds.labels[i] = k;
    }
    return ds;
  };
  return {assemble(train_rows, Split::kTrain), assemble(eval_rows, Split::kEval)};
}

void save_features(const Dataset& ds, std::ostream& out, Precision precision) {
  ds.validate();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kClpfVersion);
  put_le<std::uint16_t>(out, precision == Precision::kF32 ? kFlagF32 : 0);
  put_le<std::uint64_t>(out, ds.size());
  put_le<std::uint64_t>(out, ds.dim());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.class_count));
  for (std::size_t label : ds.labels)
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(label));
  for (double v : ds.inputs.data()) {
    if (precision == Precision::kF32) {
      put_le<std::uint32_t>(out,
                            std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  if (!out) fail(ErrorCode::kIo, "failed writing CLPF stream");
}

Dataset load_features(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) {
    fail(ErrorCode::kTruncated, "CLPF truncated while reading magic");
  }
  if (magic != kMagic) fail(ErrorCode::kBadMagic, "not a CLPF file (bad magic)");
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != kClpfVersion) {
    fail(ErrorCode::kVersionMismatch,
         "CLPF version " + std::to_string(version) + " unsupported (expected " +
             std::to_string(kClpfVersion) + ")");
  }
  const auto flags = get_le<std::uint16_t>(in, "flags");
  const auto n = get_le<std::uint64_t>(in, "row count");
  const auto dim = get_le<std::uint64_t>(in, "dimension");
  const auto class_count = get_le<std::uint32_t>(in, "class count");
  const bool f32 = flags & kFlagF32;

  // Guard against absurd headers before allocating.
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 34;
  if (n > kMaxEntries || dim > kMaxEntries || (dim && n > kMaxEntries / dim)) {
    fail(ErrorCode::kTruncated, "CLPF header sizes exceed any payload");
  }

  Dataset ds;
  ds.class_count = class_count;
  ds.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto label = get_le<std::uint32_t>(in, "labels");
    if (label >= class_count) {
      fail(ErrorCode::kLabelOutOfRange,
           "CLPF label " + std::to_string(label) + " at row " +
               std::to_string(i) + " outside class count " +
               std::to_string(class_count));
    }
    ds.labels[i] = label;
  }
  std::vector<double> payload(n * dim);
  for (double& v : payload) {
    v = f32 ? static_cast<double>(
                  std::bit_cast<float>(get_le<std::uint32_t>(in, "payload")))
            : std::bit_cast<double>(get_le<std::uint64_t>(in, "payload"));
  }
  ds.inputs = Matrix::from_checked(n, dim, std::move(payload));
  return ds;
}

void save_features_csv(const Dataset& ds, std::ostream& out) {
  ds.validate();
  out << "label";
  for (std::size_t j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (double v : ds.inputs.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "failed writing feature CSV");
}

Dataset load_features_csv(std::istream& in, std::size_t class_count) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kTruncated, "empty feature CSV");
  if (line.rfind("label", 0) != 0) {
    fail(ErrorCode::kBadMagic, "feature CSV must start with a 'label' column");
  }
  const std::size_t dim =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));

  Dataset ds;
  std::vector<double> values;
  std::size_t max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      if (col == 0) {
        const long long label = std::strtoll(cell.c_str(), &end, 10);
        if (end == cell.c_str() || label < 0) {
          fail(ErrorCode::kLabelOutOfRange,
               "feature CSV line " + std::to_string(line_no) +
                   ": bad label '" + cell + "'");
        }
        ds.labels.push_back(static_cast<std::size_t>(label));
        max_label = std::max(max_label, static_cast<std::size_t>(label));
      } else {
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) {
          fail(ErrorCode::kTruncated, "feature CSV line " +
                                          std::to_string(line_no) +
                                          ": bad value '" + cell + "'");
        }
        values.push_back(v);
      }
      ++col;
    }
    if (col != dim + 1) {
      fail(ErrorCode::kTruncated, "feature CSV line " + std::to_string(line_no) +
                                      " has " + std::to_string(col) +
                                      " fields, expected " +
                                      std::to_string(dim + 1));
    }
  }
  ds.class_count = class_count ? class_count
                               : (ds.labels.empty() ? 0 : max_label + 1);
  ds.inputs = Matrix::from_checked(ds.labels.size(), dim, std::move(values));
  ds.validate();
  return ds;
}

void save_features(const Dataset& ds, const std::filesystem::path& path,
                   Precision precision) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  if (has_csv_extension(path)) {
    save_features_csv(ds, out);
  } else {
    save_features(ds, out, precision);
  }
}

Dataset load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return has_csv_extension(path) ? load_features_csv(in) : load_features(in);
}

}  // namespace clpdd
