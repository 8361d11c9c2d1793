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

#ifndef AIFLOW_FAMILIAL_DECOMPOSE_H_
#define AIFLOW_FAMILIAL_DECOMPOSE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aiflow/numerics/linalg.h"
#include "aiflow/numerics/matrix.h"

namespace aiflow::familial {

// Cholesky factor of the calibration covariance: s * s^T = x * x^T + ridge * I.
struct WhiteningContext {
  Matrix s;  // n x n, lower-triangular
  std::size_t calib_count = 0;
  double ridge = 0.0;
};

// A linear layer w (m x n) replaced by w_u (m x h) followed by w_v (h x n).
struct DecomposedLayer {
  Matrix w_u;
  Matrix w_v;
  std::size_t hidden_dim = 0;
  std::size_t rows = 0;  // m
  std::size_t cols = 0;  // n

  std::size_t ParameterCount() const { return hidden_dim * (rows + cols); }
  Matrix Product() const { return w_u * w_v; }
  // Keeps the leading `h` components (largest singular values first).
  DecomposedLayer Truncate(std::size_t h) const;
};

// 1e-6 * trace(x x^T) / n.
double DefaultRidge(const Matrix& x);

// `x` is n x N: one calibration feature per column. With no ridge given,
// DefaultRidge(x) is used.
WhiteningContext Whiten(const Matrix& x, std::optional<double> ridge = std::nullopt);

// SVD of the whitened weight w * s.
SvdResult WhitenedSvd(const Matrix& w, const WhiteningContext& ctx);

// Factors from an existing whitened SVD:
//   w_u = U_h * Sigma_h^(1/2),  w_v = Sigma_h^(1/2) * V_h^T * s^-1
// with s^-1 applied through a triangular solve.
DecomposedLayer FactorsFromSvd(const SvdResult& svd, const WhiteningContext& ctx,
                               std::size_t h);

DecomposedLayer DecomposeLayer(const Matrix& w, const WhiteningContext& ctx, std::size_t h);

// Sum of squared singular values beyond the first h.
double TruncationLoss(std::span<const double> sigma, std::size_t h);

// ||w x - w_u w_v x||_F^2 evaluated directly on the calibration features.
double MeasuredLoss(const Matrix& w, const DecomposedLayer& layer, const Matrix& x);

// h (m + n) / (m n): parameter (and MAC) ratio of the factored layer.
double ParameterRatio(std::size_t m, std::size_t n, std::size_t h);

}  // namespace aiflow::familial

#endif  // AIFLOW_FAMILIAL_DECOMPOSE_H_
