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

#ifndef AIFLOW_SPECDEC_VERIFY_H_
#define AIFLOW_SPECDEC_VERIFY_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aiflow/numerics/rng.h"
#include "aiflow/toylm/token_model.h"
#include "aiflow/toylm/toy_lm.h"

namespace aiflow::specdec {

using toylm::Token;
using toylm::TokenDistribution;
using toylm::TokenModel;

// Supplies U[0,1) draws. Rng-backed in normal runs; scripted in tests.
using UniformSource = std::function<double()>;

UniformSource FromRng(Rng& rng);

struct DraftBatch {
  std::vector<Token> tokens;
  std::vector<TokenDistribution> draft_dists;  // p_d at each position
  std::vector<Token> base_context;
};

struct VerifyResult {
  std::size_t accepted_count = 0;
  std::optional<Token> correction_token;  // present iff accepted_count < gamma
  std::size_t rng_draws_used = 0;
};

// Samples gamma tokens autoregressively from `device`, one draw per token.
DraftBatch Draft(const TokenModel& device, std::span<const Token> context, std::size_t gamma,
                 const UniformSource& uniform);
DraftBatch Draft(const TokenModel& device, std::span<const Token> context, std::size_t gamma,
                 Rng& rng);
// Same draws as Draft, but uses `work` (the context) as scratch space and
// restores it before returning; base_context is left empty. Avoids copying
// long contexts every round.
DraftBatch DraftInPlace(const TokenModel& device, std::vector<Token>& work, std::size_t gamma,
                        const UniformSource& uniform);

// Scans positions in order. Position i draws u and accepts x_i iff
// p_t(x_i) > 0 and u <= p_t(x_i) / p_d(x_i). The first rejection draws one
// more uniform to sample the correction from normalized max(0, p_t - p_d).
VerifyResult Verify(std::span<const TokenDistribution> target_dists, const DraftBatch& batch,
                    const UniformSource& uniform);
VerifyResult Verify(std::span<const TokenDistribution> target_dists, const DraftBatch& batch,
                    Rng& rng);

// Normalized max(0, p_t - p_d); falls back to p_t if that is all zero.
TokenDistribution ResidualDistribution(const TokenDistribution& p_t, const TokenDistribution& p_d);

// sum_x min(p_d(x), p_t(x))
double ExpectedAcceptance(const TokenDistribution& p_d, const TokenDistribution& p_t);

}  // namespace aiflow::specdec

#endif  // AIFLOW_SPECDEC_VERIFY_H_
