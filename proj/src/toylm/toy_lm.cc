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

#include "aiflow/toylm/toy_lm.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "aiflow/error.h"
#include "aiflow/io/binary.h"

namespace aiflow::toylm {
namespace {

constexpr std::uint8_t kFormatVersion = 1;
constexpr double kNormEps = 1e-6;

Matrix ScaledNormal(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_data()) v = rng.Normal() * scale;
  return m;
}

void ValidateConfig(const ToyLmConfig& c) {
  Require(c.vocab_size >= 2, ErrorCode::kInvalidInput, "vocab_size must be at least 2");
  Require(c.embed_dim >= 1, ErrorCode::kInvalidInput, "embed_dim must be at least 1");
  Require(c.num_layers >= 1, ErrorCode::kInvalidInput, "num_layers must be at least 1");
  Require(c.context_window >= 1, ErrorCode::kInvalidInput, "context_window must be at least 1");
}

}  // namespace

TokenDistribution Softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  TokenDistribution out{std::vector<double>(logits.size())};
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.probs[i] = std::exp(logits[i] - peak);
    total += out.probs[i];
  }
  for (double& p : out.probs) p /= total;
  return out;
}

ToyLm ToyLm::Build(const ToyLmConfig& config) {
  ValidateConfig(config);
  const std::size_t d = config.embed_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Rng rng(config.seed);
  ToyLm lm;
  lm.config_ = config;
  lm.embedding_ = ScaledNormal(rng, config.vocab_size, d, scale);
  for (std::size_t l = 0; l < config.num_layers; ++l)
    lm.blocks_.push_back(ScaledNormal(rng, d, d, scale));
  lm.lm_head_ = ScaledNormal(rng, config.vocab_size, d, scale);
  return lm;
}

std::vector<double> ToyLm::Pool(std::span<const Token> context) const {
  const std::size_t d = config_.embed_dim;
  std::vector<double> x(d, 0.0);
  for (Token t : context)
    Require(t < config_.vocab_size, ErrorCode::kInvalidToken,
            "token " + std::to_string(t) + " outside vocabulary of " +
                std::to_string(config_.vocab_size));
  const std::size_t n = std::min(context.size(), config_.context_window);
  if (n == 0) return x;
  for (std::size_t k = context.size() - n; k < context.size(); ++k) {
    const auto row = embedding_.row(context[k]);
    for (std::size_t i = 0; i < d; ++i) x[i] += row[i];
  }
  for (double& v : x) v /= static_cast<double>(n);
  return x;
}

// Blocks are 1-based in the exit numbering: applies blocks from+1 .. to.
void ToyLm::ApplyBlocks(std::vector<double>& x, std::size_t from, std::size_t to) const {
  for (std::size_t l = from; l < to; ++l) {
    const std::vector<double> wx = MatVec(blocks_[l], x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += std::tanh(wx[i]);
  }
}

TokenDistribution ToyLm::Head(std::span<const double> x) const {
  const double d = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= d;
  std::vector<double> z(x.begin(), x.end());
  double sq = 0.0;
  for (double& v : z) {
    v -= mean;
    sq += v * v;
  }
  const double rms = std::sqrt(sq / d + kNormEps);
  for (double& v : z) v /= rms;
  return Softmax(MatVec(lm_head_, z));
}

TokenDistribution ToyLm::ForwardFull(std::span<const Token> context) const {
  std::vector<double> x = Pool(context);
  ApplyBlocks(x, 0, config_.num_layers);
  return Head(x);
}

std::vector<double> ToyLm::ActivationAt(std::span<const Token> context, std::size_t exit) const {
  Require(exit <= config_.num_layers, ErrorCode::kInvalidInput,
          "exit " + std::to_string(exit) + " beyond " + std::to_string(config_.num_layers) +
              " layers");
  std::vector<double> x = Pool(context);
  ApplyBlocks(x, 0, exit);
  return x;
}

ExitOutput ToyLm::ForwardExit(std::span<const Token> context, std::size_t exit) const {
  Require(exit >= 1 && exit <= config_.num_layers, ErrorCode::kInvalidInput,
          "exit index " + std::to_string(exit) + " outside 1.." +
              std::to_string(config_.num_layers));
  std::vector<double> x = ActivationAt(context, exit);
  ExitOutput out;
  out.activation = ExitActivation{exit, x};
  if (auto it = branches_.find(exit); it != branches_.end()) {
    const std::vector<double> inner = MatVec(it->second.w_v, x);
    const std::vector<double> wx = MatVec(it->second.w_u, inner);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += std::tanh(wx[i]);
  }
  out.dist = Head(x);
  return out;
}

TokenDistribution ToyLm::ResumeFrom(const ExitActivation& act) const {
  Require(act.exit_index <= config_.num_layers, ErrorCode::kInvalidInput,
          "activation exit index " + std::to_string(act.exit_index) + " out of range");
  Require(act.state.size() == config_.embed_dim, ErrorCode::kInvalidInput,
          "activation has " + std::to_string(act.state.size()) + " entries, expected " +
              std::to_string(config_.embed_dim));
  for (double v : act.state)
    Require(std::isfinite(v), ErrorCode::kInvalidInput, "activation has non-finite entries");
  std::vector<double> x = act.state;
  ApplyBlocks(x, act.exit_index, config_.num_layers);
  return Head(x);
}

std::size_t BranchHiddenDim(std::size_t embed_dim, double compression_ratio) {
  Require(compression_ratio > 0.0 && compression_ratio <= 1.0, ErrorCode::kInvalidInput,
          "compression ratio must lie in (0, 1]");
  const auto h =
      static_cast<std::size_t>(std::llround(compression_ratio * static_cast<double>(embed_dim) / 2.0));
  Require(h >= 1, ErrorCode::kInvalidInput, "compression ratio leaves an empty branch");
  return h;
}

ToyLm ToyLm::AttachBranch(std::size_t exit, double compression_ratio,
                          const familial::WhiteningContext& ctx) const {
  Require(exit >= 1 && exit < config_.num_layers, ErrorCode::kInvalidInput,
          "branch exit must lie in 1.." + std::to_string(config_.num_layers - 1));
  const std::size_t h = BranchHiddenDim(config_.embed_dim, compression_ratio);
  Require(ctx.s.rows() == config_.embed_dim, ErrorCode::kInvalidInput,
          "whitening context dimension does not match embed_dim");
  ToyLm out = *this;
  out.branches_.insert_or_assign(exit, familial::DecomposeLayer(blocks_[exit], ctx, h));
  return out;
}

familial::WhiteningContext ToyLm::CalibrationContext(std::size_t exit, std::size_t count,
                                                     std::uint64_t seed) const {
  Require(count >= 1, ErrorCode::kInvalidInput, "calibration needs at least one context");
  Rng rng = Rng::Derive(config_.seed, {seed, exit});
  Matrix x(config_.embed_dim, count);
  std::vector<Token> context(config_.context_window);
  for (std::size_t c = 0; c < count; ++c) {
    for (Token& t : context) t = static_cast<Token>(rng.NextU64() % config_.vocab_size);
    const std::vector<double> a = ActivationAt(context, exit);
    for (std::size_t i = 0; i < a.size(); ++i) x(i, c) = a[i];
  }
  return familial::Whiten(x);
}

std::vector<std::uint8_t> ToyLm::Save() const {
  ByteWriter w;
  w.PutTag("TOYL");
  w.PutU8(kFormatVersion);
  w.PutU32(static_cast<std::uint32_t>(config_.vocab_size));
  w.PutU32(static_cast<std::uint32_t>(config_.embed_dim));
  w.PutU32(static_cast<std::uint32_t>(config_.num_layers));
  w.PutU32(static_cast<std::uint32_t>(config_.context_window));
  w.PutU64(config_.seed);
  auto put = [&w](const Matrix& m) {
    for (double v : m.data()) w.PutF64(v);
  };
  put(embedding_);
  for (const Matrix& b : blocks_) put(b);
  put(lm_head_);
  w.PutU32(static_cast<std::uint32_t>(branches_.size()));
  for (const auto& [exit, layer] : branches_) {
    w.PutU32(static_cast<std::uint32_t>(exit));
    w.PutU32(static_cast<std::uint32_t>(layer.hidden_dim));
    put(layer.w_u);
    put(layer.w_v);
  }
  return w.Release();
}

ToyLm ToyLm::Load(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kInvalidInput);
  r.ExpectTag("TOYL");
  const std::uint8_t version = r.GetU8();
  Require(version == kFormatVersion, ErrorCode::kInvalidInput,
          "unsupported TOYL version " + std::to_string(version));
  ToyLmConfig c;
  c.vocab_size = r.GetU32();
  c.embed_dim = r.GetU32();
  c.num_layers = r.GetU32();
  c.context_window = r.GetU32();
  c.seed = r.GetU64();
  ValidateConfig(c);
  const std::size_t d = c.embed_dim;
  const std::size_t fixed = 8 * (2 * c.vocab_size * d + c.num_layers * d * d);
  Require(r.remaining() >= fixed + 4, ErrorCode::kInvalidInput, "TOYL payload is truncated");
  auto get = [&r](std::size_t rows, std::size_t cols) {
    std::vector<double> data(rows * cols);
    for (double& v : data) v = r.GetF64();
    return Matrix(rows, cols, std::move(data));
  };
  ToyLm lm;
  lm.config_ = c;
  lm.embedding_ = get(c.vocab_size, d);
  for (std::size_t l = 0; l < c.num_layers; ++l) lm.blocks_.push_back(get(d, d));
  lm.lm_head_ = get(c.vocab_size, d);
  const std::uint32_t num_branches = r.GetU32();
  for (std::uint32_t b = 0; b < num_branches; ++b) {
    const std::size_t exit = r.GetU32();
    const std::size_t h = r.GetU32();
    Require(exit >= 1 && exit < c.num_layers && h >= 1 && h <= d, ErrorCode::kInvalidInput,
            "TOYL branch header out of range");
    Require(r.remaining() >= 8 * 2 * d * h, ErrorCode::kInvalidInput, "TOYL branch is truncated");
    Matrix w_u = get(d, h);
    Matrix w_v = get(h, d);
    lm.branches_.insert_or_assign(exit,
                                  familial::DecomposedLayer{std::move(w_u), std::move(w_v), h, d, d});
  }
  Require(r.remaining() == 0, ErrorCode::kInvalidInput, "TOYL has trailing bytes");
  return lm;
}

Token SampleWithUniform(const TokenDistribution& dist, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    cumulative += dist.probs[i];
    last_positive = i;
    if (u < cumulative) return static_cast<Token>(i);
  }
  // Rounding left the total slightly below u.
  return static_cast<Token>(last_positive);
}

Token Sample(const TokenDistribution& dist, Rng& rng) { return SampleWithUniform(dist, rng.Uniform()); }

}  // namespace aiflow::toylm
