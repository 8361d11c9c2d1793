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

#ifndef AIFLOW_FAMILIAL_RANK_ALLOCATION_H_
#define AIFLOW_FAMILIAL_RANK_ALLOCATION_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace aiflow::familial {

struct LayerShape {
  std::size_t rows = 0;  // m
  std::size_t cols = 0;  // n
};

struct RankAllocation {
  std::vector<std::size_t> per_layer_rank;
  std::vector<double> predicted_loss;  // TruncationLoss per layer at its rank
  std::size_t budget = 0;
  std::size_t parameters_used = 0;
};

// Greedy marginal-gain allocation under a total parameter budget. Every layer
// starts at rank 1; each step grants one rank to the layer with the largest
// sigma[h]^2 / (m + n) among those whose next rank still fits, lowest index
// first on ties. Stops when no further rank fits.
RankAllocation AllocateRanks(std::span<const std::vector<double>> layer_sigmas,
                             std::span<const LayerShape> layer_shapes, std::size_t budget);

}  // namespace aiflow::familial

#endif  // AIFLOW_FAMILIAL_RANK_ALLOCATION_H_
