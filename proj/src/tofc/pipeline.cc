// Copyright 2026 The AIFlow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aiflow/tofc/pipeline.h"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "aiflow/error.h"
#include "aiflow/io/binary.h"
#include "aiflow/numerics/rng.h"

namespace aiflow::tofc {

TofcResult RunTofcPipeline(const Matrix& features, const TofcConfig& cfg,
                           std::span<const LaplacianModel> models) {
  Require(cfg.num_centers >= 1, ErrorCode::kInvalidInput, "number of centers must be at least 1");
  Require(!models.empty(), ErrorCode::kInvalidInput, "pipeline needs at least one model");
  TofcResult out;
  out.clusters = DpcKnnCluster(features, cfg.k_neighbors, cfg.num_centers);
  out.symbols = Quantize(out.clusters.merged);
  out.stats.selection_counts.assign(models.size(), 0);
  for (std::size_t r = 0; r < out.symbols.rows; ++r) {
    const std::size_t id = Route(out.symbols.row(r), models);
    out.routing.push_back(id);
    ++out.stats.selection_counts[id];
  }
  out.bitstream = EncodeBitstream(out.symbols, models, out.routing);
  out.stats.num_centers = cfg.num_centers;
  out.stats.bytes = out.bitstream.size();
  out.stats.payload_bytes = out.bitstream.size() - HeaderBytes(out.symbols.rows);
  out.stats.est_bits = EstimateRate(out.symbols, models, out.routing);
  out.stats.balance = BalanceMetric(out.stats.selection_counts);
  return out;
}

Matrix SmoothFeatures(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  Require(rows >= 1 && dims >= 1, ErrorCode::kInvalidInput, "feature shape must be non-empty");
  Rng rng(seed);
  constexpr int kHarmonics = 3;
  std::vector<double> amp(dims * kHarmonics), phase(dims * kHarmonics), freq(dims * kHarmonics);
  for (std::size_t j = 0; j < dims * kHarmonics; ++j) {
    amp[j] = 8.0 * rng.Uniform() / kHarmonics;
    phase[j] = 2.0 * std::numbers::pi * rng.Uniform();
    freq[j] = 1.0 + static_cast<double>(rng.NextU64() % 3);
  }
  Matrix m(rows, dims);
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(rows);
    for (std::size_t j = 0; j < dims; ++j) {
      double v = 0.0;
      for (int h = 0; h < kHarmonics; ++h) {
        const std::size_t k = j * kHarmonics + h;
        v += amp[k] * std::sin(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
      }
      m(i, j) = v + 0.1 * rng.Normal();
    }
  }
  return m;
}

std::vector<std::uint8_t> EncodeFeatures(const Matrix& features) {
  ByteWriter w;
  w.PutTag("FEAT");
  w.PutU8(kFeatureFileVersion);
  w.PutU32(static_cast<std::uint32_t>(features.rows()));
  w.PutU32(static_cast<std::uint32_t>(features.cols()));
  for (double v : features.data()) w.PutF32(static_cast<float>(v));
  return w.Release();
}

Matrix DecodeFeatures(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kIoError);
  r.ExpectTag("FEAT");
  const std::uint8_t version = r.GetU8();
  Require(version == kFeatureFileVersion, ErrorCode::kIoError,
          "unsupported feature file version " + std::to_string(version));
  const std::size_t n = r.GetU32();
  const std::size_t d = r.GetU32();
  Require(n >= 1 && d >= 1, ErrorCode::kIoError, "feature file is empty");
  Require(r.remaining() == 4 * n * d, ErrorCode::kIoError,
          "feature file payload does not match its header");
  std::vector<double> data(n * d);
  for (double& v : data) {
    v = r.GetF32();
    Require(std::isfinite(v), ErrorCode::kIoError, "feature file has non-finite values");
  }
  return Matrix(n, d, std::move(data));
}

Matrix ParseFeaturesCsv(std::string_view text) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view() : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      Require(ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(v),
              ErrorCode::kIoError,
              "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
      data.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = count;
    Require(count == cols, ErrorCode::kIoError,
            "line " + std::to_string(line_no) + " has " + std::to_string(count) +
                " values, expected " + std::to_string(cols));
    ++rows;
  }
  Require(rows >= 1, ErrorCode::kIoError, "feature CSV has no rows");
  return Matrix(rows, cols, std::move(data));
}

Matrix LoadFeatures(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return ParseFeaturesCsv(ReadFileText(path));
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodeFeatures(bytes);
  } catch (const Error& e) {
    Fail(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

}  // namespace aiflow::tofc
