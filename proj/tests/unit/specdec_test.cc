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

#include <cmath>
#include <gtest/gtest.h>
#include <memory>
#include <vector>

#include "aiflow/error.h"
#include "aiflow/specdec/decoder.h"
#include "aiflow/specdec/verify.h"
#include "json.hpp"
#include "specdec_oracle.h"

namespace aiflow::specdec {
namespace {

using testing::EnumerateRound;
using testing::FixedLatencyClock;
using testing::MaxConditionalError;
using testing::RandomContextModel;

TokenDistribution Dist(std::vector<double> p) { return TokenDistribution{std::move(p)}; }

toylm::FunctionModel Constant(TokenDistribution d) {
  const std::size_t v = d.size();
  return toylm::FunctionModel(v, [d](std::span<const Token>) { return d; });
}

UniformSource Script(std::vector<double> u) {
  auto data = std::make_shared<std::vector<double>>(std::move(u));
  auto pos = std::make_shared<std::size_t>(0);
  return [data, pos] { return data->at((*pos)++); };
}

TEST(DraftTest, SingleTokenBatch) {
  const auto m = Constant(Dist({0.25, 0.75}));
  Rng rng(1);
  const DraftBatch b = Draft(m, std::vector<Token>{0}, 1, rng);
  ASSERT_EQ(b.tokens.size(), 1u);
  ASSERT_EQ(b.draft_dists.size(), 1u);
  EXPECT_EQ(b.base_context, std::vector<Token>{0});
}

TEST(DraftTest, OneHotModelIsDeterministic) {
  // Next token = last token + 1 (mod 4).
  const toylm::FunctionModel m(4, [](std::span<const Token> ctx) {
    TokenDistribution d{std::vector<double>(4, 0.0)};
    d.probs[ctx.empty() ? 0 : (ctx.back() + 1) % 4] = 1.0;
    return d;
  });
  Rng rng(2);
  EXPECT_EQ(Draft(m, std::vector<Token>{2}, 4, rng).tokens, (std::vector<Token>{3, 0, 1, 2}));
}

TEST(DraftTest, FixedSeedReproducible) {
  const RandomContextModel m(8, 5, 2);
  Rng a(3);
  Rng b(3);
  EXPECT_EQ(Draft(m, {}, 4, a).tokens, Draft(m, {}, 4, b).tokens);
  EXPECT_THROW(Draft(m, {}, 0, a), Error);
}

TEST(VerifyTest, IdenticalModelsAcceptEverything) {
  const RandomContextModel m(8, 7, 1);
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const DraftBatch b = Draft(m, std::vector<Token>{1}, 4, rng);
    const VerifyResult v = Verify(b.draft_dists, b, rng);
    EXPECT_EQ(v.accepted_count, 4u);
    EXPECT_FALSE(v.correction_token.has_value());
    EXPECT_EQ(v.rng_draws_used, 4u);
  }
}

TEST(VerifyTest, ZeroTargetProbabilityAlwaysRejects) {
  // p_d = (0.5, 0.5), p_t = (1, 0), drafted token 1: rejected for any u, and
  // the residual is (1, 0).
  DraftBatch b{{1}, {Dist({0.5, 0.5})}, {}};
  const std::vector<TokenDistribution> target = {Dist({1.0, 0.0})};
  for (double u : {0.0, 0.3, 0.999}) {
    const VerifyResult v = Verify(target, b, Script({u, 0.7}));
    EXPECT_EQ(v.accepted_count, 0u);
    ASSERT_TRUE(v.correction_token.has_value());
    EXPECT_EQ(*v.correction_token, 0u);
    EXPECT_EQ(v.rng_draws_used, 2u);
  }
}

TEST(VerifyTest, TwoTokenMarginalIsTarget) {
  // Drafted 0 (prob 0.5) is always accepted; drafted 1 is always replaced by 0.
  const std::vector<TokenDistribution> target = {Dist({1.0, 0.0})};
  double p0 = 0.0;
  for (Token x : {0u, 1u}) {
    DraftBatch b{{x}, {Dist({0.5, 0.5})}, {}};
    const VerifyResult v = Verify(target, b, Script({0.5, 0.5}));
    const Token out = v.correction_token ? *v.correction_token : x;
    if (out == 0) p0 += 0.5;
  }
  EXPECT_EQ(p0, 1.0);
}

TEST(VerifyTest, AcceptanceThresholdIsInclusive) {
  DraftBatch b{{0}, {Dist({0.5, 0.5})}, {}};
  const std::vector<TokenDistribution> target = {Dist({0.25, 0.75})};
  EXPECT_EQ(Verify(target, b, Script({0.5})).accepted_count, 1u);
  EXPECT_EQ(Verify(target, b, Script({0.5000001, 0.1})).accepted_count, 0u);
}

TEST(VerifyTest, ZeroDraftProbabilityIsProtocolViolation) {
  DraftBatch b{{1}, {Dist({1.0, 0.0})}, {}};
  try {
    Verify(std::vector<TokenDistribution>{Dist({0.5, 0.5})}, b, Script({0.1}));
    FAIL() << "expected protocol-violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolViolation);
  }
}

TEST(VerifyTest, WrongTargetCount) {
  DraftBatch b{{0, 0}, {Dist({1.0, 0.0}), Dist({1.0, 0.0})}, {}};
  EXPECT_THROW(Verify(std::vector<TokenDistribution>{Dist({1.0, 0.0})}, b, Script({0.1})), Error);
}

TEST(ExpectedAcceptanceTest, Examples) {
  EXPECT_DOUBLE_EQ(ExpectedAcceptance(Dist({0.2, 0.8}), Dist({0.2, 0.8})), 1.0);
  EXPECT_EQ(ExpectedAcceptance(Dist({1.0, 0.0}), Dist({0.0, 1.0})), 0.0);
  EXPECT_EQ(ExpectedAcceptance(Dist({0.5, 0.5}), Dist({1.0, 0.0})), 0.5);
}

TEST(EnumerationTest, TwoTierRoundPreservesTargetExactly) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t vocab = 2 + seed % 7;  // 3..8
    const std::size_t gamma = 1 + seed % 4;
    const RandomContextModel device(vocab, 100 + seed, 2, 0.2);
    const RandomContextModel edge(vocab, 200 + seed, 2, 0.2);
    const std::vector<const TokenModel*> models = {&device, &edge};
    const std::vector<Token> ctx = {1};
    const auto e = EnumerateRound(models, ctx, gamma);
    EXPECT_EQ(e.mismatches, 0u);
    EXPECT_NEAR(e.total_probability, 1.0, 1e-12);
    EXPECT_LE(MaxConditionalError(e, edge, ctx, gamma), 1e-12) << "seed " << seed;
  }
}

TEST(EnumerationTest, ThreeTierRoundPreservesCloudExactly) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t vocab = 2 + seed % 3;  // 2..4
    const std::size_t gamma = 1 + seed % 2;
    const RandomContextModel device(vocab, 300 + seed, 2, 0.2);
    const RandomContextModel edge(vocab, 400 + seed, 2, 0.2);
    const RandomContextModel cloud(vocab, 500 + seed, 2, 0.2);
    const std::vector<const TokenModel*> models = {&device, &edge, &cloud};
    const std::vector<Token> ctx = {0, 1};
    const auto e = EnumerateRound(models, ctx, gamma);
    EXPECT_EQ(e.mismatches, 0u);
    EXPECT_NEAR(e.total_probability, 1.0, 1e-12);
    EXPECT_LE(MaxConditionalError(e, cloud, ctx, gamma), 1e-12) << "seed " << seed;
  }
}

TEST(EnumerationTest, CloudEqualToEdgeReducesToTwoTier) {
  const RandomContextModel device(4, 11, 1);
  const RandomContextModel edge(4, 12, 1);
  const std::vector<const TokenModel*> two = {&device, &edge};
  const std::vector<const TokenModel*> three = {&device, &edge, &edge};
  const std::vector<Token> ctx = {3};
  const auto a = EnumerateRound(two, ctx, 2);
  const auto b = EnumerateRound(three, ctx, 2);
  ASSERT_EQ(a.outputs.size(), b.outputs.size());
  for (const auto& [out, w] : a.outputs) EXPECT_NEAR(b.outputs.at(out), w, 1e-12);
}

TEST(SequentialTest, IdenticalModelsMatchDeviceOnlyDecoding) {
  const RandomContextModel m(8, 21, 3);
  const std::vector<const TokenModel*> models = {&m, &m};
  ProtocolConfig cfg;
  cfg.draft_len = 3;
  Rng a(77);
  const DecodeTranscript t = RunSequential(cfg, models, std::vector<Token>{1, 2}, 100, a);
  EXPECT_EQ(t.tokens.size(), 100u);
  EXPECT_EQ(t.AcceptanceRate(), 1.0);
  Rng b(77);
  const DecodeTranscript solo = RunStandalone(Role::kDevice, m, std::vector<Token>{1, 2}, 100, b, 3);
  EXPECT_EQ(t.tokens, solo.tokens);
}

TEST(SequentialTest, AccountingIsExact) {
  const RandomContextModel device(8, 31, 2);
  const RandomContextModel edge(8, 32, 2);
  const RandomContextModel cloud(8, 33, 2);
  for (std::size_t tiers : {2u, 3u}) {
    std::vector<const TokenModel*> models = {&device, &edge, &cloud};
    models.resize(tiers);
    ProtocolConfig cfg;
    cfg.draft_len = 4;
    cfg.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
    cfg.tiers.resize(tiers);
    for (std::size_t n : {1u, 7u, 50u}) {
      Rng rng(n);
      const DecodeTranscript t = RunSequential(cfg, models, {}, n, rng);
      ASSERT_EQ(t.tokens.size(), n);
      EXPECT_EQ(t.totals.accepted + t.totals.rejected, n);
      for (const RoundRecord& r : t.rounds) {
        EXPECT_LE(r.accepted, r.drafted);
        EXPECT_LE(r.drafted, cfg.draft_len);
      }
    }
  }
}

TEST(SequentialTest, SameSeedSameTranscript) {
  const RandomContextModel device(8, 41, 2);
  const RandomContextModel edge(8, 42, 2);
  const std::vector<const TokenModel*> models = {&device, &edge};
  ProtocolConfig cfg;
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(TranscriptToJson(RunSequential(cfg, models, {}, 64, a)),
            TranscriptToJson(RunSequential(cfg, models, {}, 64, b)));
}

TEST(SequentialTest, RejectsBadConfig) {
  const RandomContextModel m(4, 1, 1);
  const std::vector<const TokenModel*> one = {&m};
  ProtocolConfig cfg;
  Rng rng(1);
  EXPECT_THROW(RunSequential(cfg, one, {}, 4, rng), Error);
  cfg.draft_len = 0;
  const std::vector<const TokenModel*> two = {&m, &m};
  EXPECT_THROW(RunSequential(cfg, two, {}, 4, rng), Error);
  cfg.draft_len = 2;
  cfg.compute_cost[Role::kEdge] = 0.0;
  EXPECT_THROW(RunSequential(cfg, two, {}, 4, rng), Error);
}

TEST(SequentialTest, MonteCarloMarginalMatchesTarget) {
  const RandomContextModel device(8, 51, 1);
  const RandomContextModel edge(8, 52, 1);
  const std::vector<const TokenModel*> models = {&device, &edge};
  ProtocolConfig cfg;
  cfg.draft_len = 4;
  constexpr std::size_t kTokens = 200000;
  const std::vector<Token> prompt = {0};
  Rng rng(9);
  const DecodeTranscript t = RunSequential(cfg, models, prompt, kTokens, rng);
  std::vector<double> freq(8, 0.0);
  for (Token x : t.tokens) freq[x] += 1.0 / kTokens;
  const auto expected = testing::MarkovExpectedMarginal(edge, prompt, kTokens);
  EXPECT_LE(testing::TotalVariation(freq, expected), 0.01);
}

TEST(SequentialTest, FirstPositionAcceptanceWithinThreeSigma) {
  const RandomContextModel device(6, 61, 1);
  const RandomContextModel edge(6, 62, 1);
  const std::vector<Token> ctx = {2};
  const double alpha = ExpectedAcceptance(device.Predict(ctx), edge.Predict(ctx));
  constexpr int kTrials = 100000;
  Rng rng(10);
  int accepted = 0;
  for (int i = 0; i < kTrials; ++i) {
    const DraftBatch b = Draft(device, ctx, 1, rng);
    accepted += static_cast<int>(Verify(std::vector{edge.Predict(ctx)}, b, rng).accepted_count);
  }
  const double sigma = std::sqrt(alpha * (1.0 - alpha) / kTrials);
  EXPECT_NEAR(accepted / static_cast<double>(kTrials), alpha, 3.0 * sigma);
}

TEST(ScheduleTest, AlignmentLength) {
  ProtocolConfig cfg;
  cfg.compute_cost = {{Role::kDevice, 0.010}, {Role::kEdge, 0.040}};
  EXPECT_EQ(PipelineSchedule(cfg), 4u);
  cfg.compute_cost[Role::kEdge] = 0.005;
  EXPECT_EQ(PipelineSchedule(cfg), 1u);
  cfg.compute_cost[Role::kEdge] = 0.010;
  EXPECT_EQ(PipelineSchedule(cfg), 1u);
}

TEST(ScheduleTest, FullAcceptanceHandComputedTimes) {
  // device 10 ms/token, gamma 4, verify 30 ms, 10 ms links, no byte cost.
  // Sequential round = 40 + 10 + 30 + 10 = 90 ms. Pipelined result arrivals
  // are 90, 130, 180, 220 ms (drafts one batch ahead of the verifier).
  const RandomContextModel m(8, 71, 1);
  const std::vector<const TokenModel*> models = {&m, &m};
  ProtocolConfig cfg;
  cfg.draft_len = 4;
  Rng rng(1);
  const DecodeTranscript t = RunSequential(cfg, models, {}, 16, rng);
  ASSERT_EQ(t.totals.rounds, 4u);
  FixedLatencyClock seq(0.010, 1e300);
  EXPECT_NEAR(ScheduleSequential(cfg, t, seq), 0.360, 1e-12);
  EXPECT_EQ(seq.messages, 8u);
  EXPECT_EQ(seq.bytes, 4 * (DraftMessageBytes(4) + ResultMessageBytes(false)));
  FixedLatencyClock pipe(0.010, 1e300);
  EXPECT_NEAR(SchedulePipelined(cfg, t, pipe), 0.220, 1e-12);
  EXPECT_EQ(pipe.discarded_drafts, 0u);
}

TEST(ScheduleTest, ZeroAcceptanceDiscardsOneBatchPerRound) {
  const auto device = Constant(Dist({1.0, 0.0}));
  const auto edge = Constant(Dist({0.0, 1.0}));
  const std::vector<const TokenModel*> models = {&device, &edge};
  ProtocolConfig cfg;
  cfg.draft_len = 4;
  Rng rng(2);
  const DecodeTranscript t = RunSequential(cfg, models, {}, 20, rng);
  EXPECT_EQ(t.tokens, std::vector<Token>(20, 1));
  EXPECT_EQ(t.AcceptanceRate(), 0.0);
  FixedLatencyClock seq(0.010, 1e300);
  FixedLatencyClock pipe(0.010, 1e300);
  const double s = ScheduleSequential(cfg, t, seq);
  const double p = SchedulePipelined(cfg, t, pipe);
  EXPECT_LE(p, s + 1e-12);
  // Round i commits one token; its speculative batch covers positions
  // i+4.. and is cut at the 20-token horizon: 13 full batches plus 3, 2, 1.
  EXPECT_EQ(pipe.discarded_drafts, 16u);
  EXPECT_NEAR(pipe.busy[Role::kDevice], seq.busy[Role::kDevice] + 58 * 0.010, 1e-12);
}

TEST(ScheduleTest, PipelinedNeverSlowerThanSequential) {
  const RandomContextModel device(8, 81, 1);
  const RandomContextModel edge(8, 82, 1);
  const std::vector<const TokenModel*> models = {&device, &edge};
  for (std::size_t gamma = 1; gamma <= 6; ++gamma) {
    ProtocolConfig cfg;
    cfg.draft_len = gamma;
    Rng a(gamma);
    const DecodeTranscript t = RunSequential(cfg, models, {}, 200, a);
    FixedLatencyClock c1(0.002, 1e6);
    FixedLatencyClock c2(0.002, 1e6);
    Rng b(gamma);
    const TimedTranscript piped = RunPipelined(cfg, models, {}, 200, b, c2);
    EXPECT_EQ(piped.transcript.tokens, t.tokens);
    EXPECT_LE(piped.wall_s, ScheduleSequential(cfg, t, c1) + 1e-12);
  }
}

TEST(ScheduleTest, PipelinedRequiresTwoTiers) {
  const RandomContextModel m(4, 1, 1);
  const std::vector<const TokenModel*> models = {&m, &m, &m};
  ProtocolConfig cfg;
  cfg.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
  FixedLatencyClock clock(0.001, 1e6);
  Rng rng(1);
  EXPECT_THROW(RunPipelined(cfg, models, {}, 4, rng, clock), Error);
}

TEST(ScheduleTest, ThreeTierRoundRelaysThroughEdge) {
  const RandomContextModel m(4, 1, 1);
  const std::vector<const TokenModel*> models = {&m, &m, &m};
  ProtocolConfig cfg;
  cfg.draft_len = 2;
  cfg.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
  Rng rng(1);
  const DecodeTranscript t = RunSequential(cfg, models, {}, 2, rng);
  FixedLatencyClock clock(0.001, 1e300);
  // 20 ms draft, 1 ms up, 30 ms edge, 1 ms, 50 ms cloud, 1 ms + 1 ms back.
  EXPECT_NEAR(ScheduleSequential(cfg, t, clock), 0.104, 1e-12);
  EXPECT_EQ(clock.messages, 4u);
}

TEST(TranscriptTest, JsonShape) {
  const RandomContextModel device(4, 91, 1);
  const RandomContextModel edge(4, 92, 1);
  const std::vector<const TokenModel*> models = {&device, &edge};
  ProtocolConfig cfg;
  Rng rng(3);
  const DecodeTranscript t = RunSequential(cfg, models, {}, 10, rng);
  const auto j = nlohmann::json::parse(TranscriptToJson(t));
  EXPECT_EQ(j["tokens"].size(), 10u);
  EXPECT_EQ(j["rounds"][0]["boundary"], "device-edge");
  EXPECT_EQ(j["totals"]["emitted"], 10u);
  EXPECT_EQ(j["totals"]["accepted"].get<std::size_t>() + j["totals"]["rejected"].get<std::size_t>(),
            10u);
}

}  // namespace
}  // namespace aiflow::specdec
