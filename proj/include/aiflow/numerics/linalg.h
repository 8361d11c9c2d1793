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

#ifndef AIFLOW_NUMERICS_LINALG_H_
#define AIFLOW_NUMERICS_LINALG_H_

#include <vector>

#include "aiflow/numerics/matrix.h"

namespace aiflow {

// Thin SVD a = u * diag(sigma) * v^T with r = min(rows, cols).
struct SvdResult {
  Matrix u;                    // m x r, orthonormal columns
  std::vector<double> sigma;   // r values, non-increasing, >= 0
  Matrix v;                    // n x r, orthonormal columns
};

// One-sided (Hestenes) Jacobi SVD. Columns of u whose singular value is
// numerically zero are completed to an orthonormal set. Each u column is
// sign-normalized so that its first entry with magnitude above 1e-12 is
// positive; the matching v column is flipped with it.
SvdResult SvdReduced(const Matrix& a);

// u * diag(sigma) * v^T.
Matrix Reconstruct(const SvdResult& svd);

// Lower-triangular s with s * s^T = a. Throws NotPositiveDefiniteError when a
// pivot falls at or below max(pivot_floor, 1e-14 * max diagonal).
Matrix CholeskyLower(const Matrix& a, double pivot_floor = 0.0);

// Solves s * y = b for lower-triangular s by forward substitution.
Matrix SolveLowerTriangular(const Matrix& s, const Matrix& b);

// Solves s^T * y = b for lower-triangular s by back substitution.
Matrix SolveLowerTriangularTransposed(const Matrix& s, const Matrix& b);

}  // namespace aiflow

#endif  // AIFLOW_NUMERICS_LINALG_H_
