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

#include "aiflow/tofc/dpc_knn.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aiflow/error.h"

namespace aiflow::tofc {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

ClusterResult DpcKnnCluster(const Matrix& features, std::size_t k_neighbors,
                            std::size_t num_centers) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  Require(n >= 1 && d >= 1, ErrorCode::kInvalidInput, "feature set is empty");
  Require(features.AllFinite(), ErrorCode::kInvalidInput, "features have non-finite entries");
  Require(num_centers >= 1 && num_centers <= n, ErrorCode::kInvalidInput,
          "number of centers " + std::to_string(num_centers) + " outside 1.." + std::to_string(n));

  ClusterResult out;
  if (n == 1) {
    out.center_indices = {0};
    out.assignment = {0};
    out.merged = features;
    out.rho = {1.0};
    out.delta = {0.0};
    return out;
  }
  Require(k_neighbors >= 1 && k_neighbors < n, ErrorCode::kInvalidInput,
          "k_neighbors must lie in 1.." + std::to_string(n - 1));

  std::vector<double> dist2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist2[i * n + j] = dist2[j * n + i] = SquaredDistance(features.row(i), features.row(j));

  out.rho.resize(n);
  std::vector<double> others;
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(dist2[i * n + j]);
    std::partial_sort(others.begin(), others.begin() + k_neighbors, others.end());
    double sum = 0.0;
    for (std::size_t t = 0; t < k_neighbors; ++t) sum += others[t];
    out.rho[i] = std::exp(-sum / static_cast<double>(k_neighbors));
  }

  double max_dist = 0.0;
  for (double v : dist2) max_dist = std::max(max_dist, v);
  max_dist = std::sqrt(max_dist);
  out.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (out.rho[j] <= out.rho[i]) continue;
      const double dij = std::sqrt(dist2[i * n + j]);
      if (best < 0.0 || dij < best) best = dij;
    }
    out.delta[i] = best < 0.0 ? max_dist : best;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.rho[a] * out.delta[a] > out.rho[b] * out.delta[b];
  });
  out.center_indices.assign(order.begin(), order.begin() + num_centers);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> center_of(n, kNone);
  for (std::size_t c = 0; c < num_centers; ++c) center_of[out.center_indices[c]] = c;
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (center_of[i] != kNone) {
      out.assignment[i] = center_of[i];
      continue;
    }
    std::size_t best = 0;
    double best_d = std::sqrt(dist2[i * n + out.center_indices[0]]);
    for (std::size_t c = 1; c < num_centers; ++c) {
      const double dc = std::sqrt(dist2[i * n + out.center_indices[c]]);
      if (dc < best_d) {
        best_d = dc;
        best = c;
      }
    }
    out.assignment[i] = best;
  }

  out.merged = Matrix(num_centers, d);
  std::vector<std::size_t> counts(num_centers, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = out.assignment[i];
    ++counts[c];
    auto row = out.merged.mutable_row(c);
    const auto src = features.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
  }
  for (std::size_t c = 0; c < num_centers; ++c) {
    auto row = out.merged.mutable_row(c);
    for (double& v : row) v /= static_cast<double>(counts[c]);
  }
  return out;
}

}  // namespace aiflow::tofc
