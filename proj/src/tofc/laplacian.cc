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

#include "aiflow/tofc/laplacian.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aiflow/error.h"

namespace aiflow::tofc {
namespace {

void CheckDim(const LaplacianModel& model, std::size_t dim) {
  Require(dim < model.dims(), ErrorCode::kInvalidInput,
          "dimension " + std::to_string(dim) + " outside model with " +
              std::to_string(model.dims()) + " dims");
}

// P(lo < X < hi) for X ~ Laplace(mu, b), evaluated without cancellation
// against 1 on either tail.
double Mass(double lo, double hi, double mu, double b) {
  if (lo >= mu) return 0.5 * (std::exp(-(lo - mu) / b) - std::exp(-(hi - mu) / b));
  if (hi <= mu) return 0.5 * (std::exp((hi - mu) / b) - std::exp((lo - mu) / b));
  return 1.0 - 0.5 * std::exp(-(hi - mu) / b) - 0.5 * std::exp((lo - mu) / b);
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::int32_t LaplacianModel::Low(std::size_t dim) const {
  return static_cast<std::int32_t>(std::lround(mu[dim])) - half_range;
}

std::int32_t LaplacianModel::High(std::size_t dim) const {
  return static_cast<std::int32_t>(std::lround(mu[dim])) + half_range;
}

SymbolMatrix Quantize(const Matrix& values) {
  SymbolMatrix s{values.rows(), values.cols(), {}};
  s.data.reserve(values.size());
  constexpr double kLimit = 2147483647.0;
  for (double v : values.data()) {
    const double q = std::round(v);
    Require(std::isfinite(q) && std::abs(q) <= kLimit, ErrorCode::kInvalidInput,
            "value does not fit a 32-bit symbol");
    s.data.push_back(static_cast<std::int32_t>(q));
  }
  return s;
}

LaplacianModel FitLaplacian(const Matrix& calib, std::size_t id, std::int32_t half_range) {
  Require(calib.rows() >= 2 && calib.cols() >= 1, ErrorCode::kInvalidInput,
          "Laplacian fit needs at least two calibration rows");
  Require(calib.AllFinite(), ErrorCode::kInvalidInput, "calibration has non-finite entries");
  Require(half_range >= 0 && half_range < (1 << 20), ErrorCode::kInvalidInput,
          "half_range out of range");
  LaplacianModel m;
  m.id = id;
  m.half_range = half_range;
  for (std::size_t j = 0; j < calib.cols(); ++j) {
    const std::vector<double> col = calib.Column(j);
    const double mu = Median(col);
    double dev = 0.0;
    for (double v : col) dev += std::abs(v - mu);
    dev /= static_cast<double>(col.size());
    Require(std::abs(mu) < 1e9, ErrorCode::kInvalidInput, "calibration location too large");
    m.mu.push_back(mu);
    m.b.push_back(std::max(dev, kMinScale));
  }
  return m;
}

std::vector<LaplacianModel> FitModelBank(const Matrix& calib, std::size_t count,
                                         std::int32_t half_range) {
  Require(count >= 1 && count <= 255, ErrorCode::kInvalidInput, "model count must lie in 1..255");
  Require(calib.rows() >= 2 * count, ErrorCode::kInvalidInput,
          "need at least two calibration rows per model");
  std::vector<LaplacianModel> bank;
  const std::size_t n = calib.rows();
  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t begin = e * n / count;
    const std::size_t end = (e + 1) * n / count;
    Matrix part(end - begin, calib.cols());
    for (std::size_t r = begin; r < end; ++r) {
      const auto src = calib.row(r);
      std::copy(src.begin(), src.end(), part.mutable_row(r - begin).begin());
    }
    bank.push_back(FitLaplacian(part, e, half_range));
  }
  return bank;
}

bool InRange(const LaplacianModel& model, std::size_t dim, std::int32_t q) {
  CheckDim(model, dim);
  return q >= model.Low(dim) && q <= model.High(dim);
}

double EscapeMass(const LaplacianModel& model, std::size_t dim) {
  CheckDim(model, dim);
  const double mu = model.mu[dim];
  const double b = model.b[dim];
  const double lo = model.Low(dim) - 0.5;
  const double hi = model.High(dim) + 0.5;
  return 0.5 * std::exp((lo - mu) / b) + 0.5 * std::exp(-(hi - mu) / b);
}

double Pmf(const LaplacianModel& model, std::size_t dim, std::int32_t q) {
  if (!InRange(model, dim, q)) return EscapeMass(model, dim);
  return Mass(q - 0.5, q + 0.5, model.mu[dim], model.b[dim]);
}

double EstimateRowBits(std::span<const std::int32_t> row, const LaplacianModel& model) {
  Require(row.size() == model.dims(), ErrorCode::kInvalidInput,
          "row has " + std::to_string(row.size()) + " symbols, model has " +
              std::to_string(model.dims()) + " dims");
  double bits = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    // An escape mass that underflows would make the estimate infinite; the
    // floor keeps routing comparisons finite.
    const double p = std::max(Pmf(model, j, row[j]), std::numeric_limits<double>::min());
    bits -= std::log2(p);
    if (!InRange(model, j, row[j])) bits += kEscapeRawBits;
  }
  return bits;
}

double EstimateRate(const SymbolMatrix& symbols, std::span<const LaplacianModel> models,
                    std::span<const std::size_t> routing) {
  Require(routing.size() == symbols.rows, ErrorCode::kInvalidInput, "one model id per row");
  double bits = 0.0;
  for (std::size_t r = 0; r < symbols.rows; ++r) {
    Require(routing[r] < models.size(), ErrorCode::kInvalidInput,
            "unknown model id " + std::to_string(routing[r]));
    bits += EstimateRowBits(symbols.row(r), models[routing[r]]);
  }
  return bits;
}

std::size_t Route(std::span<const std::int32_t> row, std::span<const LaplacianModel> models) {
  Require(!models.empty(), ErrorCode::kInvalidInput, "routing needs at least one model");
  std::size_t best = 0;
  double best_bits = EstimateRowBits(row, models[0]);
  for (std::size_t e = 1; e < models.size(); ++e) {
    const double bits = EstimateRowBits(row, models[e]);
    if (bits < best_bits) {
      best_bits = bits;
      best = e;
    }
  }
  return best;
}

double BalanceMetric(std::span<const std::size_t> selection_counts) {
  Require(!selection_counts.empty(), ErrorCode::kInvalidInput, "balance needs at least one model");
  std::size_t total = 0;
  for (std::size_t c : selection_counts) total += c;
  Require(total >= 1, ErrorCode::kInvalidInput, "balance needs at least one selection");
  const double uniform = 1.0 / static_cast<double>(selection_counts.size());
  double s = 0.0;
  for (std::size_t c : selection_counts) {
    const double f = static_cast<double>(c) / static_cast<double>(total) - uniform;
    s += f * f;
  }
  return s;
}

}  // namespace aiflow::tofc
