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

#ifndef AIFLOW_TOFC_PIPELINE_H_
#define AIFLOW_TOFC_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "aiflow/numerics/matrix.h"
#include "aiflow/tofc/codec.h"
#include "aiflow/tofc/dpc_knn.h"
#include "aiflow/tofc/laplacian.h"

namespace aiflow::tofc {

struct TofcConfig {
  std::size_t k_neighbors = 5;
  std::size_t num_centers = 1;  // M
};

struct TofcStats {
  std::size_t num_centers = 0;
  std::size_t bytes = 0;          // whole bitstream
  std::size_t payload_bytes = 0;  // range-coded part only
  double est_bits = 0.0;
  double balance = 0.0;
  std::vector<std::size_t> selection_counts;
};

struct TofcResult {
  std::vector<std::uint8_t> bitstream;
  ClusterResult clusters;
  SymbolMatrix symbols;
  std::vector<std::size_t> routing;
  TofcStats stats;
};

// cluster -> merge -> quantize -> route -> encode.
TofcResult RunTofcPipeline(const Matrix& features, const TofcConfig& cfg,
                           std::span<const LaplacianModel> models);

// Sums of a few low-frequency sinusoids along the row index (amplitude ~8)
// plus small Gaussian noise: neighbouring rows are similar.
Matrix SmoothFeatures(std::size_t rows, std::size_t dims, std::uint64_t seed);

// "FEAT" | version u8 | N u32 | d u32 | N*d float32, all little-endian.
inline constexpr std::uint8_t kFeatureFileVersion = 1;
std::vector<std::uint8_t> EncodeFeatures(const Matrix& features);
Matrix DecodeFeatures(std::span<const std::uint8_t> bytes);
// One row per line, comma-separated; blank lines and '#' comments skipped.
Matrix ParseFeaturesCsv(std::string_view text);
// Picks the format from the extension (.csv) or the magic; errors are io-error.
Matrix LoadFeatures(const std::filesystem::path& path);

}  // namespace aiflow::tofc

#endif  // AIFLOW_TOFC_PIPELINE_H_
