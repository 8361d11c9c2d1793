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

#ifndef AIFLOW_FAMILIAL_FACTOR_IO_H_
#define AIFLOW_FAMILIAL_FACTOR_IO_H_

#include <cstdint>
#include <span>
#include <vector>

#include "aiflow/familial/decompose.h"

namespace aiflow::familial {

inline constexpr std::uint8_t kFactorFormatVersion = 1;

// "FAMD" | version u8 | m u32 | n u32 | h u32 | w_u (m*h f64) | w_v (h*n f64),
// all little-endian, matrices row-major.
std::vector<std::uint8_t> EncodeFactors(const DecomposedLayer& layer);
DecomposedLayer DecodeFactors(std::span<const std::uint8_t> bytes);

}  // namespace aiflow::familial

#endif  // AIFLOW_FAMILIAL_FACTOR_IO_H_
