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

#include "aiflow/toylm/token_model.h"

#include <algorithm>
#include <string>

#include "aiflow/error.h"

namespace aiflow::toylm {

ToyLmExit::ToyLmExit(std::shared_ptr<const ToyLm> lm, std::size_t exit)
    : lm_(std::move(lm)), exit_(exit) {
  Require(lm_ != nullptr, ErrorCode::kInvalidInput, "null model");
  Require(exit_ >= 1 && exit_ <= lm_->config().num_layers, ErrorCode::kInvalidInput,
          "exit index " + std::to_string(exit_) + " out of range");
}

// Only the trailing window reaches the model, so long decoding contexts are
// not rescanned on every token. Callers validate the tokens they feed in.
TokenDistribution ToyLmExit::Predict(std::span<const Token> context) const {
  const std::size_t w = std::min(context.size(), lm_->config().context_window);
  return lm_->ForwardExit(context.last(w), exit_).dist;
}

}  // namespace aiflow::toylm
