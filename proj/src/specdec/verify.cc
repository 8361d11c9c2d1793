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

#include "aiflow/specdec/verify.h"

#include <algorithm>
#include <string>

#include "aiflow/error.h"

namespace aiflow::specdec {
namespace {

void CheckDistribution(const TokenDistribution& d, std::size_t vocab, const char* what) {
  Require(d.size() == vocab, ErrorCode::kInvalidInput,
          std::string(what) + " has " + std::to_string(d.size()) + " entries, expected " +
              std::to_string(vocab));
}

}  // namespace

UniformSource FromRng(Rng& rng) {
  return [&rng] { return rng.Uniform(); };
}

DraftBatch DraftInPlace(const TokenModel& device, std::vector<Token>& work, std::size_t gamma,
                        const UniformSource& uniform) {
  Require(gamma >= 1, ErrorCode::kInvalidInput, "draft length must be at least 1");
  const std::size_t base = work.size();
  DraftBatch batch;
  try {
    for (std::size_t i = 0; i < gamma; ++i) {
      TokenDistribution p = device.Predict(work);
      CheckDistribution(p, device.vocab_size(), "draft distribution");
      const Token t = toylm::SampleWithUniform(p, uniform());
      batch.tokens.push_back(t);
      batch.draft_dists.push_back(std::move(p));
      work.push_back(t);
    }
  } catch (...) {
    work.resize(base);
    throw;
  }
  work.resize(base);
  return batch;
}

DraftBatch Draft(const TokenModel& device, std::span<const Token> context, std::size_t gamma,
                 const UniformSource& uniform) {
  std::vector<Token> work(context.begin(), context.end());
  DraftBatch batch = DraftInPlace(device, work, gamma, uniform);
  batch.base_context = std::move(work);
  return batch;
}

DraftBatch Draft(const TokenModel& device, std::span<const Token> context, std::size_t gamma,
                 Rng& rng) {
  return Draft(device, context, gamma, FromRng(rng));
}

TokenDistribution ResidualDistribution(const TokenDistribution& p_t, const TokenDistribution& p_d) {
  Require(p_t.size() == p_d.size(), ErrorCode::kInvalidInput, "distribution sizes differ");
  TokenDistribution r{std::vector<double>(p_t.size())};
  double total = 0.0;
  for (std::size_t x = 0; x < p_t.size(); ++x) {
    r.probs[x] = std::max(0.0, p_t[x] - p_d[x]);
    total += r.probs[x];
  }
  if (!(total > 0.0)) return p_t;
  for (double& v : r.probs) v /= total;
  return r;
}

VerifyResult Verify(std::span<const TokenDistribution> target_dists, const DraftBatch& batch,
                    const UniformSource& uniform) {
  const std::size_t gamma = batch.tokens.size();
  Require(gamma >= 1 && batch.draft_dists.size() == gamma, ErrorCode::kInvalidInput,
          "malformed draft batch");
  Require(target_dists.size() == gamma, ErrorCode::kInvalidInput,
          "need " + std::to_string(gamma) + " target distributions, got " +
              std::to_string(target_dists.size()));
  VerifyResult result;
  for (std::size_t i = 0; i < gamma; ++i) {
    const TokenDistribution& p_d = batch.draft_dists[i];
    const TokenDistribution& p_t = target_dists[i];
    CheckDistribution(p_t, p_d.size(), "target distribution");
    const Token x = batch.tokens[i];
    Require(x < p_d.size(), ErrorCode::kInvalidToken, "drafted token outside vocabulary");
    if (!(p_d[x] > 0.0))
      Fail(ErrorCode::kProtocolViolation,
           "drafted token " + std::to_string(x) + " has zero draft probability");
    const double u = uniform();
    ++result.rng_draws_used;
    if (p_t[x] > 0.0 && u <= p_t[x] / p_d[x]) {
      ++result.accepted_count;
      continue;
    }
    result.correction_token = toylm::SampleWithUniform(ResidualDistribution(p_t, p_d), uniform());
    ++result.rng_draws_used;
    break;
  }
  return result;
}

VerifyResult Verify(std::span<const TokenDistribution> target_dists, const DraftBatch& batch,
                    Rng& rng) {
  return Verify(target_dists, batch, FromRng(rng));
}

double ExpectedAcceptance(const TokenDistribution& p_d, const TokenDistribution& p_t) {
  Require(p_t.size() == p_d.size(), ErrorCode::kInvalidInput, "distribution sizes differ");
  double s = 0.0;
  for (std::size_t x = 0; x < p_t.size(); ++x) s += std::min(p_d[x], p_t[x]);
  return s;
}

}  // namespace aiflow::specdec
