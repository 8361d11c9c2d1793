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

#ifndef AIFLOW_FAMILIAL_HPCD_H_
#define AIFLOW_FAMILIAL_HPCD_H_

#include <cstddef>
#include <vector>

#include "aiflow/familial/decompose.h"
#include "aiflow/numerics/matrix.h"

namespace aiflow::familial {

// Hierarchy of low-rank components. Component k approximates the residual left
// by components 1..k-1; per-component weights are folded into the factors.
struct HpcdStack {
  std::vector<DecomposedLayer> components;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return components.size(); }
  std::vector<std::size_t> Ranks() const;
  std::size_t ParameterCount(std::size_t k) const;  // first k components
};

// Component 1 is DecomposeLayer(w, ctx, rank); component k >= 2 is the
// whitened rank-`rank` approximation of w minus the sum of the earlier ones.
// All components share `ctx`. Earlier components are never revisited.
HpcdStack HpcdBuild(const Matrix& w, const WhiteningContext& ctx, std::size_t rank,
                    std::size_t num_components);

// Sum of the first k components' products, 1 <= k <= K.
Matrix HpcdTruncate(const HpcdStack& stack, std::size_t k);

// ||(w - approx) * s||_F.
double WhitenedResidualNorm(const Matrix& w, const Matrix& approx, const WhiteningContext& ctx);

}  // namespace aiflow::familial

#endif  // AIFLOW_FAMILIAL_HPCD_H_
