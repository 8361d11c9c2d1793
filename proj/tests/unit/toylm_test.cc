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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <limits>
#include <memory>
#include <vector>

#include "aiflow/error.h"
#include "aiflow/toylm/token_model.h"
#include "aiflow/toylm/toy_lm.h"

namespace aiflow::toylm {
namespace {

ToyLmConfig SmallConfig(std::uint64_t seed) {
  ToyLmConfig c;
  c.seed = seed;
  return c;
}

std::vector<Token> RandomContext(Rng& rng, std::size_t len, std::size_t vocab) {
  std::vector<Token> ctx(len);
  for (Token& t : ctx) t = static_cast<Token>(rng.NextU64() % vocab);
  return ctx;
}

Eigen::MatrixXd ToEigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

// Independent transcription of the forward pass on Eigen types.
Eigen::VectorXd ReferenceForward(const ToyLm& lm, const std::vector<Token>& ctx,
                                 std::size_t exit, bool use_branch) {
  const auto& c = lm.config();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(c.embed_dim);
  const std::size_t n = std::min(ctx.size(), c.context_window);
  const Eigen::MatrixXd emb = ToEigen(lm.embedding());
  for (std::size_t k = ctx.size() - n; k < ctx.size(); ++k) x += emb.row(ctx[k]).transpose();
  if (n > 0) x /= static_cast<double>(n);
  for (std::size_t l = 0; l < exit; ++l)
    x += (ToEigen(lm.blocks()[l]) * x).unaryExpr([](double v) { return std::tanh(v); });
  if (use_branch) {
    const auto& br = lm.branches().at(exit);
    x += (ToEigen(br.w_u) * (ToEigen(br.w_v) * x)).unaryExpr([](double v) { return std::tanh(v); });
  }
  x.array() -= x.mean();
  x /= std::sqrt(x.squaredNorm() / static_cast<double>(x.size()) + 1e-6);
  Eigen::VectorXd logits = ToEigen(lm.lm_head()) * x;
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

void ExpectValidDistribution(const TokenDistribution& d) {
  double total = 0.0;
  for (double p : d.probs) {
    EXPECT_GT(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ToyLmBuildTest, SameSeedSameWeights) {
  const ToyLm a = ToyLm::Build(SmallConfig(3));
  const ToyLm b = ToyLm::Build(SmallConfig(3));
  EXPECT_EQ(a.embedding(), b.embedding());
  EXPECT_EQ(a.blocks(), b.blocks());
  EXPECT_EQ(a.lm_head(), b.lm_head());
}

TEST(ToyLmBuildTest, DifferentSeedsDiffer) {
  EXPECT_NE(ToyLm::Build(SmallConfig(3)).embedding(), ToyLm::Build(SmallConfig(4)).embedding());
}

TEST(ToyLmBuildTest, RejectsInvalidConfig) {
  ToyLmConfig c = SmallConfig(1);
  c.vocab_size = 1;
  EXPECT_THROW(ToyLm::Build(c), Error);
  c = SmallConfig(1);
  c.num_layers = 0;
  EXPECT_THROW(ToyLm::Build(c), Error);
  c = SmallConfig(1);
  c.context_window = 0;
  EXPECT_THROW(ToyLm::Build(c), Error);
}

TEST(ToyLmForwardTest, EmptyContextIsUniform) {
  // normalize(0) = 0, so every logit is zero.
  const ToyLm lm = ToyLm::Build(SmallConfig(5));
  const TokenDistribution d = lm.ForwardFull({});
  ExpectValidDistribution(d);
  for (double p : d.probs) EXPECT_NEAR(p, 1.0 / 32.0, 1e-15);
}

TEST(ToyLmForwardTest, MatchesIndependentReference) {
  const ToyLm lm = ToyLm::Build(SmallConfig(6));
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ctx = RandomContext(rng, rng.NextU64() % 9, 32);
    const TokenDistribution d = lm.ForwardFull(ctx);
    ExpectValidDistribution(d);
    const Eigen::VectorXd ref = ReferenceForward(lm, ctx, 8, false);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], ref(i), 1e-12);
  }
}

TEST(ToyLmForwardTest, OnlyTheWindowMatters) {
  const ToyLm lm = ToyLm::Build(SmallConfig(7));
  std::vector<Token> a = {9, 1, 2, 3, 4, 5, 6};
  std::vector<Token> b = {3, 2, 9, 3, 4, 5, 6};
  EXPECT_EQ(lm.ForwardFull(a).probs, lm.ForwardFull(b).probs);
}

TEST(ToyLmForwardTest, OutOfRangeTokenIsRejected) {
  const ToyLm lm = ToyLm::Build(SmallConfig(7));
  const std::vector<Token> ctx = {1, 32};
  try {
    lm.ForwardFull(ctx);
    FAIL() << "expected invalid-token";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidToken);
  }
}

TEST(ToyLmExitTest, TopExitEqualsFullForward) {
  const ToyLm lm = ToyLm::Build(SmallConfig(8));
  const std::vector<Token> ctx = {4, 8, 15, 16, 23, 42 % 32};
  EXPECT_EQ(lm.ForwardExit(ctx, 8).dist.probs, lm.ForwardFull(ctx).probs);
}

TEST(ToyLmExitTest, InvalidExitIndex) {
  const ToyLm lm = ToyLm::Build(SmallConfig(8));
  EXPECT_THROW(lm.ForwardExit({}, 0), Error);
  EXPECT_THROW(lm.ForwardExit({}, 9), Error);
}

TEST(ToyLmExitTest, EarlyExitMatchesReference) {
  const ToyLm lm = ToyLm::Build(SmallConfig(9));
  Rng rng(2);
  for (std::size_t l = 1; l <= 8; ++l) {
    const auto ctx = RandomContext(rng, 5, 32);
    const TokenDistribution d = lm.ForwardExit(ctx, l).dist;
    ExpectValidDistribution(d);
    const Eigen::VectorXd ref = ReferenceForward(lm, ctx, l, false);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], ref(i), 1e-12);
  }
}

TEST(ToyLmResumeTest, ResumeReproducesFullForwardBitForBit) {
  const ToyLm base = ToyLm::Build(SmallConfig(10));
  const ToyLm lm = base.AttachBranch(3, 0.75, base.CalibrationContext(3));
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ctx = RandomContext(rng, rng.NextU64() % 7, 32);
    const TokenDistribution full = lm.ForwardFull(ctx);
    for (std::size_t l = 1; l <= 8; ++l) {
      const ExitOutput out = lm.ForwardExit(ctx, l);
      EXPECT_EQ(out.activation.exit_index, l);
      // The branch at exit 3 affects only the early-exit distribution.
      EXPECT_EQ(lm.ResumeFrom(out.activation).probs, full.probs) << "exit " << l;
    }
  }
}

TEST(ToyLmResumeTest, RejectsBadActivations) {
  const ToyLm lm = ToyLm::Build(SmallConfig(10));
  ExitActivation act = lm.ForwardExit(std::vector<Token>{1, 2}, 2).activation;
  act.state[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(lm.ResumeFrom(act), Error);
  act = lm.ForwardExit(std::vector<Token>{1, 2}, 2).activation;
  act.exit_index = 9;
  EXPECT_THROW(lm.ResumeFrom(act), Error);
  act.exit_index = 2;
  act.state.pop_back();
  EXPECT_THROW(lm.ResumeFrom(act), Error);
}

TEST(ToyLmBranchTest, HiddenDimAndParameterAccounting) {
  EXPECT_EQ(BranchHiddenDim(16, 0.75), 6u);
  EXPECT_EQ(BranchHiddenDim(16, 1.0), 8u);
  const ToyLm base = ToyLm::Build(SmallConfig(11));
  const ToyLm lm = base.AttachBranch(2, 0.75, base.CalibrationContext(2));
  const auto& br = lm.branches().at(2);
  EXPECT_EQ(br.hidden_dim, 6u);
  EXPECT_EQ(br.ParameterCount(), 192u);
  EXPECT_DOUBLE_EQ(static_cast<double>(br.ParameterCount()), 0.75 * 16 * 16);
  const ToyLm full = base.AttachBranch(2, 1.0, base.CalibrationContext(2));
  EXPECT_EQ(full.branches().at(2).ParameterCount(), 16u * 16u);
  EXPECT_TRUE(base.branches().empty());  // the original is untouched
}

TEST(ToyLmBranchTest, RejectsInvalidArguments) {
  const ToyLm base = ToyLm::Build(SmallConfig(11));
  const auto ctx = base.CalibrationContext(2);
  EXPECT_THROW(base.AttachBranch(8, 0.75, ctx), Error);
  EXPECT_THROW(base.AttachBranch(0, 0.75, ctx), Error);
  EXPECT_THROW(base.AttachBranch(2, 0.0, ctx), Error);
  EXPECT_THROW(base.AttachBranch(2, 1.5, ctx), Error);
  EXPECT_THROW(base.AttachBranch(2, 0.01, ctx), Error);  // h rounds to 0
}

TEST(ToyLmBranchTest, BranchChangesExitDistributionAsSpecified) {
  const ToyLm base = ToyLm::Build(SmallConfig(12));
  const ToyLm lm = base.AttachBranch(2, 0.75, base.CalibrationContext(2));
  const std::vector<Token> ctx = {5, 6, 7};
  const TokenDistribution with = lm.ForwardExit(ctx, 2).dist;
  const TokenDistribution without = base.ForwardExit(ctx, 2).dist;
  EXPECT_NE(with.probs, without.probs);
  const Eigen::VectorXd ref = ReferenceForward(lm, ctx, 2, true);
  for (std::size_t i = 0; i < with.size(); ++i) EXPECT_NEAR(with[i], ref(i), 1e-12);
}

TEST(ToyLmBranchTest, BranchDecomposesTheNextBlock) {
  ToyLmConfig c = SmallConfig(13);
  c.embed_dim = 4;
  const ToyLm base = ToyLm::Build(c);
  const auto ctx = base.CalibrationContext(2);
  const ToyLm lm = base.AttachBranch(2, 1.0, ctx);
  const familial::DecomposedLayer expected = familial::DecomposeLayer(base.blocks()[2], ctx, 2);
  EXPECT_EQ(lm.branches().at(2).w_u, expected.w_u);
  EXPECT_EQ(lm.branches().at(2).w_v, expected.w_v);
  // At full rank the factors reproduce the block itself.
  const familial::DecomposedLayer exact = familial::DecomposeLayer(base.blocks()[2], ctx, 4);
  EXPECT_LT((exact.Product() - base.blocks()[2]).MaxAbs(), 1e-10);
}

TEST(ToyLmIoTest, SaveLoadRoundTrip) {
  const ToyLm base = ToyLm::Build(SmallConfig(14));
  const ToyLm lm = base.AttachBranch(4, 0.75, base.CalibrationContext(4));
  const ToyLm back = ToyLm::Load(lm.Save());
  EXPECT_EQ(back.config().seed, 14u);
  EXPECT_EQ(back.blocks(), lm.blocks());
  EXPECT_EQ(back.lm_head(), lm.lm_head());
  EXPECT_EQ(back.branches().at(4).w_u, lm.branches().at(4).w_u);
  const std::vector<Token> ctx = {1, 2, 3};
  EXPECT_EQ(back.ForwardExit(ctx, 4).dist.probs, lm.ForwardExit(ctx, 4).dist.probs);
}

TEST(ToyLmIoTest, RejectsCorruptContainers) {
  std::vector<std::uint8_t> bytes = ToyLm::Build(SmallConfig(14)).Save();
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 9);
  EXPECT_THROW(ToyLm::Load(truncated), Error);
  bytes[0] = 'X';
  EXPECT_THROW(ToyLm::Load(bytes), Error);
}

TEST(SampleTest, OneHotAlwaysReturnsThatToken) {
  TokenDistribution d{{0.0, 0.0, 1.0, 0.0}};
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(Sample(d, rng), 2u);
}

TEST(SampleTest, UniformFrequencies) {
  TokenDistribution d{{0.25, 0.25, 0.25, 0.25}};
  Rng rng(2);
  std::vector<int> counts(4, 0);
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++counts[Sample(d, rng)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(kDraws), 0.25, 0.01);
}

TEST(SampleTest, FixedSeedReproducible) {
  const ToyLm lm = ToyLm::Build(SmallConfig(15));
  const TokenDistribution d = lm.ForwardFull(std::vector<Token>{3});
  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(Sample(d, a), Sample(d, b));
}

TEST(SampleTest, InverseCdfBoundaries) {
  TokenDistribution d{{0.5, 0.0, 0.5}};
  EXPECT_EQ(SampleWithUniform(d, 0.0), 0u);
  EXPECT_EQ(SampleWithUniform(d, 0.4999), 0u);
  EXPECT_EQ(SampleWithUniform(d, 0.5), 2u);
  EXPECT_EQ(SampleWithUniform(d, 1.0), 2u);
}

TEST(TokenModelTest, ExitAdapterAndFunctionModel) {
  auto lm = std::make_shared<const ToyLm>(ToyLm::Build(SmallConfig(16)));
  const ToyLmExit top(lm, 8);
  const ToyLmExit early(lm, 2);
  const std::vector<Token> ctx = {7, 7};
  EXPECT_EQ(top.Predict(ctx).probs, lm->ForwardFull(ctx).probs);
  EXPECT_EQ(early.Predict(ctx).probs, lm->ForwardExit(ctx, 2).dist.probs);
  EXPECT_THROW(ToyLmExit(lm, 0), Error);
  const FunctionModel fixed(2, [](std::span<const Token>) { return TokenDistribution{{0.3, 0.7}}; });
  EXPECT_EQ(fixed.Predict({}).probs[1], 0.7);
  EXPECT_EQ(fixed.vocab_size(), 2u);
}

}  // namespace
}  // namespace aiflow::toylm
