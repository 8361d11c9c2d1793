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

#ifndef AIFLOW_TOFC_LAPLACIAN_H_
#define AIFLOW_TOFC_LAPLACIAN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aiflow/numerics/matrix.h"

namespace aiflow::tofc {

inline constexpr double kMinScale = 1e-3;
inline constexpr std::int32_t kDefaultHalfRange = 255;
// Bits spent on the raw value that follows an escape.
inline constexpr double kEscapeRawBits = 32.0;

// Per-dimension discretized Laplacian. Symbols in
// [round(mu) - half_range, round(mu) + half_range] get their bin mass
// F(q + 0.5) - F(q - 0.5); everything outside shares one escape mass.
struct LaplacianModel {
  std::vector<double> mu;
  std::vector<double> b;
  std::size_t id = 0;
  std::int32_t half_range = kDefaultHalfRange;

  std::size_t dims() const { return mu.size(); }
  std::int32_t Low(std::size_t dim) const;
  std::int32_t High(std::size_t dim) const;
};

// Quantized features, row-major.
struct SymbolMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> data;

  std::span<const std::int32_t> row(std::size_t r) const {
    return std::span<const std::int32_t>(data).subspan(r * cols, cols);
  }
  bool operator==(const SymbolMatrix&) const = default;
};

// q = round(value), half away from zero.
SymbolMatrix Quantize(const Matrix& values);

// Per-column median and mean absolute deviation about it (floored at
// kMinScale). Needs at least two rows.
LaplacianModel FitLaplacian(const Matrix& calib, std::size_t id,
                            std::int32_t half_range = kDefaultHalfRange);

// Splits the calibration rows into `count` contiguous groups and fits one
// model per group.
std::vector<LaplacianModel> FitModelBank(const Matrix& calib, std::size_t count,
                                         std::int32_t half_range = kDefaultHalfRange);

// Bin mass for in-range q; the shared escape mass for any q outside.
double Pmf(const LaplacianModel& model, std::size_t dim, std::int32_t q);
double EscapeMass(const LaplacianModel& model, std::size_t dim);
bool InRange(const LaplacianModel& model, std::size_t dim, std::int32_t q);

// sum of -log2 pmf(q); escaped symbols also pay kEscapeRawBits.
double EstimateRowBits(std::span<const std::int32_t> row, const LaplacianModel& model);
double EstimateRate(const SymbolMatrix& symbols, std::span<const LaplacianModel> models,
                    std::span<const std::size_t> routing);

// Model id with the lowest estimated bits for the row (lowest id on ties).
std::size_t Route(std::span<const std::int32_t> row, std::span<const LaplacianModel> models);

// sum_e (f_e - 1/E)^2 with f_e = count_e / total.
double BalanceMetric(std::span<const std::size_t> selection_counts);

}  // namespace aiflow::tofc

#endif  // AIFLOW_TOFC_LAPLACIAN_H_
