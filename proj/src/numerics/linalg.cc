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

#include "aiflow/numerics/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aiflow/error.h"

namespace aiflow {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 80;
constexpr double kSignThreshold = 1e-12;

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Columns of `a` (m >= n) are rotated until mutually orthogonal; the rotations
// accumulate into `v`. `cols` and `v_cols` hold columns contiguously.
void JacobiOrthogonalize(std::vector<std::vector<double>>& cols,
                         std::vector<std::vector<double>>& v_cols) {
  const std::size_t n = cols.size();
  const double tol = kEps * static_cast<double>(cols.empty() ? 1 : cols[0].size());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = Dot(cols[p], cols[p]);
        const double beta = Dot(cols[q], cols[q]);
        const double gamma = Dot(cols[p], cols[q]);
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto rotate = [c, s](std::vector<double>& x, std::vector<double>& y) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            const double yi = y[i];
            x[i] = c * xi - s * yi;
            y[i] = s * xi + c * yi;
          }
        };
        rotate(cols[p], cols[q]);
        rotate(v_cols[p], v_cols[q]);
      }
    }
    if (!rotated) return;
  }
}

// Tall-or-square case (m >= n).
SvdResult SvdTall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::vector<double>> cols(n, std::vector<double>(m));
  std::vector<std::vector<double>> v_cols(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = a(i, j);
    v_cols[j][j] = 1.0;
  }
  JacobiOrthogonalize(cols, v_cols);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(Dot(cols[j], cols[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double sigma_max = n == 0 ? 0.0 : norms[order[0]];
  const double zero_threshold = sigma_max * 4.0 * kEps * static_cast<double>(std::max(m, n));

  SvdResult out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  std::vector<std::vector<double>> u_cols;
  u_cols.reserve(n);
  std::vector<std::size_t> needs_completion;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    std::vector<double> u(m, 0.0);
    if (norms[j] > zero_threshold && norms[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) u[i] = cols[j][i] / norms[j];
    } else {
      needs_completion.push_back(k);
    }
    u_cols.push_back(std::move(u));
  }

  // Complete the numerically null directions: for each, take the standard
  // basis vector with the largest component outside the current span.
  for (std::size_t k : needs_completion) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t b = 0; b < m; ++b) {
      std::vector<double> e(m, 0.0);
      e[b] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        // Unfilled columns are still zero and project to nothing.
        for (std::size_t other = 0; other < n; ++other) {
          if (other == k) continue;
          const auto& o = u_cols[other];
          const double proj = Dot(e, o);
          for (std::size_t i = 0; i < m; ++i) e[i] -= proj * o[i];
        }
      }
      const double norm = std::sqrt(Dot(e, e));
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(e);
      }
    }
    for (double& x : best) x /= best_norm;
    u_cols[k] = std::move(best);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    auto& u = u_cols[k];
    auto& v = v_cols[j];
    double sign = 1.0;
    for (double x : u) {
      if (std::abs(x) > kSignThreshold) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = sign * u[i];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = sign * v[i];
  }
  return out;
}

}  // namespace

SvdResult SvdReduced(const Matrix& a) {
  Require(a.rows() >= 1 && a.cols() >= 1, ErrorCode::kInvalidInput,
          "SVD needs a non-empty matrix");
  Require(a.AllFinite(), ErrorCode::kInvalidInput, "SVD input has non-finite entries");
  if (a.rows() >= a.cols()) return SvdTall(a);

  // a^T = u' S v'^T  =>  a = v' S u'^T. Re-apply the sign rule to the new u.
  SvdResult t = SvdTall(a.Transpose());
  SvdResult out{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  for (std::size_t k = 0; k < out.sigma.size(); ++k) {
    double sign = 1.0;
    for (std::size_t i = 0; i < out.u.rows(); ++i) {
      if (std::abs(out.u(i, k)) > kSignThreshold) {
        sign = out.u(i, k) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    if (sign < 0.0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, k) = -out.u(i, k);
      for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, k) = -out.v(i, k);
    }
  }
  return out;
}

Matrix Reconstruct(const SvdResult& svd) {
  Matrix us = svd.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= svd.sigma[k];
  return MultiplyTransposed(us, svd.v);
}

Matrix CholeskyLower(const Matrix& a, double pivot_floor) {
  Require(a.rows() == a.cols(), ErrorCode::kInvalidInput, "Cholesky needs a square matrix");
  Require(a.AllFinite(), ErrorCode::kInvalidInput, "Cholesky input has non-finite entries");
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, a.MaxAbs());
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, a(i, i));
    for (std::size_t j = 0; j < i; ++j)
      Require(std::abs(a(i, j) - a(j, i)) <= 1e-9 * scale, ErrorCode::kInvalidInput,
              "Cholesky input is not symmetric at (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
  }
  const double floor = std::max(pivot_floor, 1e-14 * max_diag);

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > floor)) throw NotPositiveDefiniteError(j, pivot);
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

namespace {

void CheckTriangularSystem(const Matrix& s, const Matrix& b) {
  Require(s.rows() == s.cols(), ErrorCode::kInvalidInput, "triangular matrix must be square");
  Require(s.rows() == b.rows(), ErrorCode::kInvalidInput,
          "right-hand side has " + std::to_string(b.rows()) + " rows, expected " +
              std::to_string(s.rows()));
  double max_diag = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) max_diag = std::max(max_diag, std::abs(s(i, i)));
  for (std::size_t i = 0; i < s.rows(); ++i) {
    if (std::abs(s(i, i)) <= 1e-300 || std::abs(s(i, i)) <= 1e-15 * max_diag)
      Fail(ErrorCode::kSingularTriangular,
           "diagonal entry " + std::to_string(i) + " is numerically zero");
  }
}

}  // namespace

Matrix SolveLowerTriangular(const Matrix& s, const Matrix& b) {
  CheckTriangularSystem(s, b);
  const std::size_t n = s.rows();
  Matrix y = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = y(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= s(i, k) * y(k, c);
      y(i, c) = v / s(i, i);
    }
  }
  return y;
}

Matrix SolveLowerTriangularTransposed(const Matrix& s, const Matrix& b) {
  CheckTriangularSystem(s, b);
  const std::size_t n = s.rows();
  Matrix y = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      double v = y(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) v -= s(k, ii) * y(k, c);
      y(ii, c) = v / s(ii, ii);
    }
  }
  return y;
}

}  // namespace aiflow
