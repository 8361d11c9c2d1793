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

#ifndef AIFLOW_ERROR_H_
#define AIFLOW_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace aiflow {

enum class ErrorCode {
  kInvalidInput,
  kNotPositiveDefinite,
  kSingularTriangular,
  kInvalidRank,
  kBudgetTooSmall,
  kInvalidToken,
  kProtocolViolation,
  kMalformedBitstream,
  kInvalidScenario,
  kConfigError,
  kIoError,
  kIncompleteRun,
  kSchemaError,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by Cholesky when a pivot is not strictly positive.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(std::size_t pivot_index, double pivot)
      : Error(ErrorCode::kNotPositiveDefinite,
              "pivot " + std::to_string(pivot_index) + " is " +
                  std::to_string(pivot)),
        pivot_index_(pivot_index) {}

  std::size_t pivot_index() const { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace aiflow

#endif  // AIFLOW_ERROR_H_
