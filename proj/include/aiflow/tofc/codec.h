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

#ifndef AIFLOW_TOFC_CODEC_H_
#define AIFLOW_TOFC_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aiflow/tofc/laplacian.h"

namespace aiflow::tofc {

inline constexpr std::uint8_t kBitstreamVersion = 1;

// Integer frequencies (total 2^16) for one model dimension.
//
// Primary table: one entry per in-range symbol, then the escape. A symbol
// whose scaled mass rounds to zero is coded through the escape instead, and
// its mass moves there. The escape always gets at least 1. The rounding
// surplus or deficit is settled on the most probable symbols.
//
// After an escape, a secondary table picks between those zero-frequency
// in-range symbols (weighted by their mass) and "outside", which is followed
// by the raw value as two 16-bit uniform symbols (high half first).
struct FrequencyTable {
  std::int32_t low = 0;
  std::vector<std::uint32_t> freq;  // in-range symbols then escape
  std::vector<std::uint32_t> cum;   // freq.size() + 1 entries
  std::vector<std::int32_t> tail_symbols;
  std::vector<std::uint32_t> tail_freq;  // tail_symbols then outside
  std::vector<std::uint32_t> tail_cum;

  std::size_t escape_index() const { return freq.size() - 1; }
};

FrequencyTable BuildFrequencyTable(const LaplacianModel& model, std::size_t dim);

struct DecodedBitstream {
  SymbolMatrix symbols;
  std::vector<std::size_t> routing;
};

// "TOFC" | version u8 | M u16 | d u16 | E u8 | model id u8 per row |
// CRC32 u32 | payload. The CRC (zlib polynomial) covers the header bytes
// before it followed by every symbol as int32 little-endian, so it catches
// payload corruption after decoding.
std::vector<std::uint8_t> EncodeBitstream(const SymbolMatrix& symbols,
                                          std::span<const LaplacianModel> models,
                                          std::span<const std::size_t> routing);
DecodedBitstream DecodeBitstream(std::span<const std::uint8_t> bytes,
                                 std::span<const LaplacianModel> models);

std::size_t HeaderBytes(std::size_t rows);

}  // namespace aiflow::tofc

#endif  // AIFLOW_TOFC_CODEC_H_
