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

#include "aiflow/familial/rank_allocation.h"

#include <algorithm>
#include <string>

#include "aiflow/error.h"
#include "aiflow/familial/decompose.h"

namespace aiflow::familial {

RankAllocation AllocateRanks(std::span<const std::vector<double>> layer_sigmas,
                             std::span<const LayerShape> layer_shapes, std::size_t budget) {
  Require(layer_sigmas.size() == layer_shapes.size(), ErrorCode::kInvalidInput,
          "one singular-value list per layer shape required");
  Require(!layer_sigmas.empty(), ErrorCode::kInvalidInput, "no layers to allocate");

  const std::size_t layers = layer_sigmas.size();
  std::size_t base = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    Require(!layer_sigmas[l].empty(), ErrorCode::kInvalidInput,
            "layer " + std::to_string(l) + " has no singular values");
    base += layer_shapes[l].rows + layer_shapes[l].cols;
  }
  if (budget < base)
    Fail(ErrorCode::kBudgetTooSmall, "budget " + std::to_string(budget) +
                                         " is below the rank-1 cost " + std::to_string(base));

  RankAllocation out;
  out.budget = budget;
  out.per_layer_rank.assign(layers, 1);
  std::size_t used = base;
  while (true) {
    std::size_t best = layers;
    double best_gain = -1.0;
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t h = out.per_layer_rank[l];
      const std::size_t cost = layer_shapes[l].rows + layer_shapes[l].cols;
      if (h >= layer_sigmas[l].size() || used + cost > budget) continue;
      const double next = layer_sigmas[l][h];
      const double gain = next * next / static_cast<double>(cost);
      if (gain > best_gain) {
        best_gain = gain;
        best = l;
      }
    }
    if (best == layers) break;
    ++out.per_layer_rank[best];
    used += layer_shapes[best].rows + layer_shapes[best].cols;
  }
  out.parameters_used = used;
  out.predicted_loss.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l)
    out.predicted_loss.push_back(TruncationLoss(layer_sigmas[l], out.per_layer_rank[l]));
  return out;
}

}  // namespace aiflow::familial
