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

#ifndef AIFLOW_NUMERICS_RNG_H_
#define AIFLOW_NUMERICS_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace aiflow {

// SplitMix64 finalizer; used for seeding and stream derivation.
std::uint64_t SplitMix64(std::uint64_t x);

// xorshift64* generator.
//
//   state ^= state >> 12; state ^= state << 25; state ^= state >> 27;
//   output = state * 0x2545F4914F6CDD1D
//
// The initial state is SplitMix64(seed), replaced by a fixed non-zero constant
// if that is zero. Uniform() takes the top 53 bits of an output, so it lies in
// [0, 1). Normal() is Box-Muller over two uniforms, returning the cosine
// branch first and caching the sine branch for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream keyed by (seed, keys...). Identical keys always yield
  // identical streams.
  static Rng Derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t NextU64();
  double Uniform();
  double Normal();
  // Child generator seeded from the next output of this one.
  Rng Fork();

 private:
  std::uint64_t state_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace aiflow

#endif  // AIFLOW_NUMERICS_RNG_H_
