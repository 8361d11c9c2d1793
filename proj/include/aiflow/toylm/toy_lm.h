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

#ifndef AIFLOW_TOYLM_TOY_LM_H_
#define AIFLOW_TOYLM_TOY_LM_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "aiflow/familial/decompose.h"
#include "aiflow/numerics/matrix.h"
#include "aiflow/numerics/rng.h"

namespace aiflow::toylm {

using Token = std::uint32_t;

struct ToyLmConfig {
  std::size_t vocab_size = 32;
  std::size_t embed_dim = 16;
  std::size_t num_layers = 8;
  std::size_t context_window = 4;
  std::uint64_t seed = 0;
};

struct TokenDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

struct ExitActivation {
  std::size_t exit_index = 0;
  std::vector<double> state;
};

struct ExitOutput {
  TokenDistribution dist;
  ExitActivation activation;  // before any branch
};

// Mean-of-window embedding, residual tanh blocks, RMS-normalized shared head.
// Immutable once built.
class ToyLm {
 public:
  static ToyLm Build(const ToyLmConfig& config);

  const ToyLmConfig& config() const { return config_; }
  const Matrix& embedding() const { return embedding_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& lm_head() const { return lm_head_; }
  const std::map<std::size_t, familial::DecomposedLayer>& branches() const { return branches_; }

  TokenDistribution ForwardFull(std::span<const Token> context) const;
  ExitOutput ForwardExit(std::span<const Token> context, std::size_t exit) const;
  TokenDistribution ResumeFrom(const ExitActivation& act) const;

  // Activation after blocks 1..exit (exit = 0 gives the pooled embedding).
  std::vector<double> ActivationAt(std::span<const Token> context, std::size_t exit) const;

  // The branch at `exit` approximates block exit+1, decomposed to
  // h = round(ratio * d / 2).
  ToyLm AttachBranch(std::size_t exit, double compression_ratio,
                     const familial::WhiteningContext& ctx) const;

  // Whitening context from exit-`exit` activations of `count` seeded random
  // contexts (one feature per column).
  familial::WhiteningContext CalibrationContext(std::size_t exit, std::size_t count = 256,
                                                std::uint64_t seed = 0) const;

  std::vector<std::uint8_t> Save() const;
  static ToyLm Load(std::span<const std::uint8_t> bytes);

 private:
  ToyLm() = default;

  std::vector<double> Pool(std::span<const Token> context) const;
  void ApplyBlocks(std::vector<double>& x, std::size_t from, std::size_t to) const;
  TokenDistribution Head(std::span<const double> x) const;

  ToyLmConfig config_;
  Matrix embedding_;            // vocab x d
  std::vector<Matrix> blocks_;  // d x d each
  Matrix lm_head_;              // vocab x d
  std::map<std::size_t, familial::DecomposedLayer> branches_;
};

std::size_t BranchHiddenDim(std::size_t embed_dim, double compression_ratio);

// Inverse-CDF sampling in token order.
Token Sample(const TokenDistribution& dist, Rng& rng);
Token SampleWithUniform(const TokenDistribution& dist, double u);

TokenDistribution Softmax(std::span<const double> logits);

}  // namespace aiflow::toylm

#endif  // AIFLOW_TOYLM_TOY_LM_H_
