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

#include "aiflow/familial/decompose.h"

#include <cmath>
#include <string>

#include "aiflow/error.h"

namespace aiflow::familial {

DecomposedLayer DecomposedLayer::Truncate(std::size_t h) const {
  Require(h >= 1 && h <= hidden_dim, ErrorCode::kInvalidRank,
          "cannot keep " + std::to_string(h) + " of " + std::to_string(hidden_dim) +
              " components");
  return DecomposedLayer{w_u.LeftCols(h), w_v.TopRows(h), h, rows, cols};
}

double DefaultRidge(const Matrix& x) {
  if (x.rows() == 0) return 0.0;
  // trace(x x^T) is the squared Frobenius norm of x.
  return 1e-6 * x.SquaredFrobeniusNorm() / static_cast<double>(x.rows());
}

WhiteningContext Whiten(const Matrix& x, std::optional<double> ridge) {
  Require(x.rows() >= 1 && x.cols() >= 1, ErrorCode::kInvalidInput,
          "calibration features must be n x N with n, N >= 1");
  Require(x.AllFinite(), ErrorCode::kInvalidInput, "calibration features contain NaN/Inf");
  const double eps = ridge.value_or(DefaultRidge(x));
  Require(eps >= 0.0 && std::isfinite(eps), ErrorCode::kInvalidInput, "ridge must be >= 0");
  Matrix cov = MultiplyTransposed(x, x);
  for (std::size_t i = 0; i < cov.rows(); ++i) cov(i, i) += eps;
  return WhiteningContext{CholeskyLower(cov), x.cols(), eps};
}

SvdResult WhitenedSvd(const Matrix& w, const WhiteningContext& ctx) {
  Require(w.cols() == ctx.s.rows(), ErrorCode::kInvalidInput,
          "weight has " + std::to_string(w.cols()) + " inputs but whitening is " +
              std::to_string(ctx.s.rows()) + "-dimensional");
  return SvdReduced(w * ctx.s);
}

DecomposedLayer FactorsFromSvd(const SvdResult& svd, const WhiteningContext& ctx,
                               std::size_t h) {
  const std::size_t m = svd.u.rows();
  const std::size_t n = svd.v.rows();
  Require(h >= 1 && h <= svd.sigma.size(), ErrorCode::kInvalidRank,
          "rank " + std::to_string(h) + " outside [1, " + std::to_string(svd.sigma.size()) + "]");

  Matrix w_u(m, h);
  Matrix v_scaled(n, h);  // V_h * Sigma_h^(1/2)
  for (std::size_t k = 0; k < h; ++k) {
    const double root = std::sqrt(svd.sigma[k]);
    for (std::size_t i = 0; i < m; ++i) w_u(i, k) = svd.u(i, k) * root;
    for (std::size_t i = 0; i < n; ++i) v_scaled(i, k) = svd.v(i, k) * root;
  }
  // w_v = (s^-T V_h Sigma_h^(1/2))^T.
  Matrix w_v = SolveLowerTriangularTransposed(ctx.s, v_scaled).Transpose();
  return DecomposedLayer{std::move(w_u), std::move(w_v), h, m, n};
}

DecomposedLayer DecomposeLayer(const Matrix& w, const WhiteningContext& ctx, std::size_t h) {
  Require(h >= 1 && h <= std::min(w.rows(), w.cols()), ErrorCode::kInvalidRank,
          "rank " + std::to_string(h) + " outside [1, min(m, n)]");
  return FactorsFromSvd(WhitenedSvd(w, ctx), ctx, h);
}

double TruncationLoss(std::span<const double> sigma, std::size_t h) {
  Require(h <= sigma.size(), ErrorCode::kInvalidInput, "h exceeds the number of singular values");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    Require(sigma[i] >= 0.0, ErrorCode::kInvalidInput, "negative singular value");
    if (i > 0)
      Require(sigma[i] <= sigma[i - 1], ErrorCode::kInvalidInput,
              "singular values are not sorted non-increasingly");
  }
  double loss = 0.0;
  // Smallest first for accuracy.
  for (std::size_t i = sigma.size(); i-- > h;) loss += sigma[i] * sigma[i];
  return loss;
}

double MeasuredLoss(const Matrix& w, const DecomposedLayer& layer, const Matrix& x) {
  const Matrix diff = w * x - layer.w_u * (layer.w_v * x);
  return diff.SquaredFrobeniusNorm();
}

double ParameterRatio(std::size_t m, std::size_t n, std::size_t h) {
  return static_cast<double>(h) * static_cast<double>(m + n) /
         (static_cast<double>(m) * static_cast<double>(n));
}

}  // namespace aiflow::familial
