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

#include "aiflow/familial/hpcd.h"

#include <string>

#include "aiflow/error.h"

namespace aiflow::familial {

std::vector<std::size_t> HpcdStack::Ranks() const {
  std::vector<std::size_t> ranks;
  ranks.reserve(components.size());
  for (const auto& c : components) ranks.push_back(c.hidden_dim);
  return ranks;
}

std::size_t HpcdStack::ParameterCount(std::size_t k) const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < k && i < components.size(); ++i)
    total += components[i].ParameterCount();
  return total;
}

HpcdStack HpcdBuild(const Matrix& w, const WhiteningContext& ctx, std::size_t rank,
                    std::size_t num_components) {
  Require(rank >= 1, ErrorCode::kInvalidRank, "component rank must be >= 1");
  Require(num_components >= 1, ErrorCode::kInvalidInput, "need at least one component");
  Require(rank <= std::min(w.rows(), w.cols()), ErrorCode::kInvalidRank,
          "component rank " + std::to_string(rank) + " exceeds min(m, n)");

  HpcdStack stack;
  stack.rows = w.rows();
  stack.cols = w.cols();
  Matrix residual = w;
  for (std::size_t k = 0; k < num_components; ++k) {
    DecomposedLayer component = DecomposeLayer(residual, ctx, rank);
    residual -= component.Product();
    stack.components.push_back(std::move(component));
  }
  return stack;
}

Matrix HpcdTruncate(const HpcdStack& stack, std::size_t k) {
  Require(k >= 1 && k <= stack.size(), ErrorCode::kInvalidInput,
          "k = " + std::to_string(k) + " outside [1, " + std::to_string(stack.size()) + "]");
  Matrix sum(stack.rows, stack.cols);
  for (std::size_t i = 0; i < k; ++i) sum += stack.components[i].Product();
  return sum;
}

double WhitenedResidualNorm(const Matrix& w, const Matrix& approx, const WhiteningContext& ctx) {
  return ((w - approx) * ctx.s).FrobeniusNorm();
}

}  // namespace aiflow::familial
