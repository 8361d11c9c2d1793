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

#ifndef AIFLOW_TOYLM_TOKEN_MODEL_H_
#define AIFLOW_TOYLM_TOKEN_MODEL_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

#include "aiflow/toylm/toy_lm.h"

namespace aiflow::toylm {

// Anything that maps a context to a next-token distribution.
class TokenModel {
 public:
  virtual ~TokenModel() = default;
  virtual TokenDistribution Predict(std::span<const Token> context) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

// A ToyLm truncated at an exit; exit = num_layers is the full model.
class ToyLmExit : public TokenModel {
 public:
  ToyLmExit(std::shared_ptr<const ToyLm> lm, std::size_t exit);

  TokenDistribution Predict(std::span<const Token> context) const override;
  std::size_t vocab_size() const override { return lm_->config().vocab_size; }
  std::size_t exit() const { return exit_; }

 private:
  std::shared_ptr<const ToyLm> lm_;
  std::size_t exit_;
};

class FunctionModel : public TokenModel {
 public:
  using Fn = std::function<TokenDistribution(std::span<const Token>)>;
  FunctionModel(std::size_t vocab_size, Fn fn) : vocab_size_(vocab_size), fn_(std::move(fn)) {}

  TokenDistribution Predict(std::span<const Token> context) const override { return fn_(context); }
  std::size_t vocab_size() const override { return vocab_size_; }

 private:
  std::size_t vocab_size_;
  Fn fn_;
};

}  // namespace aiflow::toylm

#endif  // AIFLOW_TOYLM_TOKEN_MODEL_H_
