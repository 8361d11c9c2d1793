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

#ifndef AIFLOW_TOFC_DPC_KNN_H_
#define AIFLOW_TOFC_DPC_KNN_H_

#include <cstddef>
#include <vector>

#include "aiflow/numerics/matrix.h"

namespace aiflow::tofc {

struct ClusterResult {
  std::vector<std::size_t> center_indices;  // ranked by rho * delta, descending
  std::vector<std::size_t> assignment;      // per feature: position in center_indices
  Matrix merged;                            // M x d, row c = mean of cluster c
  std::vector<double> rho;
  std::vector<double> delta;
};

// Density-peaks clustering with KNN density. `features` is N x d.
//   rho_i   = exp(-mean of the k smallest squared distances to other points)
//   delta_i = min distance to a point of strictly higher rho, or the maximum
//             pairwise distance if there is none
// Centers are the top M by rho * delta (lower index on ties). Centers belong
// to their own cluster; other points join the nearest center (lower center
// rank on ties).
ClusterResult DpcKnnCluster(const Matrix& features, std::size_t k_neighbors, std::size_t num_centers);

}  // namespace aiflow::tofc

#endif  // AIFLOW_TOFC_DPC_KNN_H_
