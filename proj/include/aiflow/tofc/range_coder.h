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

#ifndef AIFLOW_TOFC_RANGE_CODER_H_
#define AIFLOW_TOFC_RANGE_CODER_H_

#include <cstdint>
#include <span>
#include <vector>

namespace aiflow::tofc {

// Carry-less 32-bit range coder (Subbotin). Totals are fixed at 2^16.
//
// Renormalization: while the top byte of low is settled
// ((low ^ (low + range)) < 2^24), or range has fallen below 2^16 (in which
// case range is cut to -low mod 2^16 so the top byte settles), shift one byte
// out. Finish writes the four bytes of low.
inline constexpr std::uint32_t kTotalBits = 16;
inline constexpr std::uint32_t kTotal = 1u << kTotalBits;

class RangeEncoder {
 public:
  void Encode(std::uint32_t cum, std::uint32_t freq);
  std::vector<std::uint8_t> Finish();

 private:
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::vector<std::uint8_t> out_;
};

// Reading past the end, or a target outside the total, raises
// malformed-bitstream.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  std::uint32_t GetTarget();  // call before Consume
  void Consume(std::uint32_t cum, std::uint32_t freq);
  // All bytes consumed and the final window equals the flushed low value.
  bool AtEnd() const { return pos_ == bytes_.size() && code_ == low_; }

 private:
  std::uint8_t NextByte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

}  // namespace aiflow::tofc

#endif  // AIFLOW_TOFC_RANGE_CODER_H_
