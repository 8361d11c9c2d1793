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

#include "aiflow/familial/factor_io.h"

#include <string>

#include "aiflow/error.h"
#include "aiflow/io/binary.h"

namespace aiflow::familial {

std::vector<std::uint8_t> EncodeFactors(const DecomposedLayer& layer) {
  ByteWriter w;
  w.PutTag("FAMD");
  w.PutU8(kFactorFormatVersion);
  w.PutU32(static_cast<std::uint32_t>(layer.rows));
  w.PutU32(static_cast<std::uint32_t>(layer.cols));
  w.PutU32(static_cast<std::uint32_t>(layer.hidden_dim));
  for (double v : layer.w_u.data()) w.PutF64(v);
  for (double v : layer.w_v.data()) w.PutF64(v);
  return w.Release();
}

DecomposedLayer DecodeFactors(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kInvalidInput);
  r.ExpectTag("FAMD");
  const std::uint8_t version = r.GetU8();
  Require(version == kFactorFormatVersion, ErrorCode::kInvalidInput,
          "unsupported FAMD version " + std::to_string(version));
  const std::size_t m = r.GetU32();
  const std::size_t n = r.GetU32();
  const std::size_t h = r.GetU32();
  Require(h >= 1 && h <= std::min(m, n), ErrorCode::kInvalidInput, "FAMD header has invalid rank");
  Require(r.remaining() == 8 * h * (m + n), ErrorCode::kInvalidInput,
          "FAMD payload length does not match header");
  auto read = [&r](std::size_t rows, std::size_t cols) {
    std::vector<double> data(rows * cols);
    for (double& v : data) v = r.GetF64();
    return Matrix(rows, cols, std::move(data));
  };
  Matrix w_u = read(m, h);
  Matrix w_v = read(h, n);
  return DecomposedLayer{std::move(w_u), std::move(w_v), h, m, n};
}

}  // namespace aiflow::familial
