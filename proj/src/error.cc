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

#include "aiflow/error.h"

namespace aiflow {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kNotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::kSingularTriangular: return "singular-triangular";
    case ErrorCode::kInvalidRank: return "invalid-rank";
    case ErrorCode::kBudgetTooSmall: return "budget-too-small";
    case ErrorCode::kInvalidToken: return "invalid-token";
    case ErrorCode::kProtocolViolation: return "protocol-violation";
    case ErrorCode::kMalformedBitstream: return "malformed-bitstream";
    case ErrorCode::kInvalidScenario: return "invalid-scenario";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kIncompleteRun: return "incomplete-run";
    case ErrorCode::kSchemaError: return "schema-error";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace aiflow
