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

#include "aiflow/specdec/decoder.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "aiflow/error.h"
#include "json.hpp"

namespace aiflow::specdec {
namespace {

// Stream keys for Rng::Derive.
constexpr std::uint64_t kDraftStream = 1;
constexpr std::uint64_t kVerifyStream = 2;  // + boundary index

double CostOf(const ProtocolConfig& cfg, Role role) {
  auto it = cfg.compute_cost.find(role);
  Require(it != cfg.compute_cost.end(), ErrorCode::kInvalidInput,
          "no compute cost for " + std::string(RoleName(role)));
  return it->second;
}

// Predictions at each prefix of `continuation` after the context in `work`;
// `work` is restored on return.
std::vector<TokenDistribution> PredictAlong(const TokenModel& model, std::vector<Token>& work,
                                            std::span<const Token> continuation) {
  const std::size_t base = work.size();
  std::vector<TokenDistribution> out;
  out.reserve(continuation.size());
  try {
    for (Token t : continuation) {
      out.push_back(model.Predict(work));
      work.push_back(t);
    }
  } catch (...) {
    work.resize(base);
    throw;
  }
  work.resize(base);
  return out;
}

RoundOutcome RunRoundInPlace(std::span<const TokenModel* const> models, std::vector<Token>& work,
                             std::size_t gamma, std::span<const UniformSource> sources) {
  Require(models.size() >= 2 && models.size() <= 3, ErrorCode::kInvalidInput,
          "a round needs two or three tiers");
  Require(sources.size() == models.size(), ErrorCode::kInvalidInput,
          "one uniform source per tier is required");
  for (const TokenModel* m : models) Require(m != nullptr, ErrorCode::kInvalidInput, "null model");

  DraftBatch batch = DraftInPlace(*models[0], work, gamma, sources[0]);
  RoundOutcome out;
  for (std::size_t b = 1; b < models.size(); ++b) {
    const std::vector<TokenDistribution> target = PredictAlong(*models[b], work, batch.tokens);
    const VerifyResult v = Verify(target, batch, sources[b]);
    out.boundaries.push_back({batch.tokens.size(), v.accepted_count, v.correction_token.has_value()});

    std::vector<Token> verified(batch.tokens.begin(), batch.tokens.begin() + v.accepted_count);
    if (v.correction_token) verified.push_back(*v.correction_token);
    if (b + 1 == models.size()) {
      out.tokens = std::move(verified);
      break;
    }
    // The verified stream becomes the next tier's draft. Its prefixes match
    // the ones `target` was computed on, so those are its p_d.
    DraftBatch next;
    next.draft_dists.assign(target.begin(), target.begin() + verified.size());
    next.tokens = std::move(verified);
    batch = std::move(next);
  }
  return out;
}

// Groups the records of each round, in round order.
std::vector<std::vector<RoundRecord>> ByRound(const DecodeTranscript& t) {
  std::vector<std::vector<RoundRecord>> rounds;
  for (const RoundRecord& r : t.rounds) {
    if (r.round >= rounds.size()) rounds.resize(r.round + 1);
    rounds[r.round].push_back(r);
  }
  for (auto& recs : rounds) {
    std::sort(recs.begin(), recs.end(),
              [](const RoundRecord& a, const RoundRecord& b) { return a.boundary < b.boundary; });
    Require(recs.size() == t.num_boundaries(), ErrorCode::kInvalidInput,
            "transcript round is missing a boundary record");
  }
  return rounds;
}

void CheckPrompt(std::span<const Token> prompt, std::size_t vocab_size) {
  for (Token t : prompt)
    Require(t < vocab_size, ErrorCode::kInvalidToken,
            "prompt token " + std::to_string(t) + " outside vocabulary of " +
                std::to_string(vocab_size));
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kDevice: return "device";
    case Role::kEdge: return "edge";
    case Role::kCloud: return "cloud";
  }
  return "unknown";
}

Role ParseRole(std::string_view name) {
  if (name == "device") return Role::kDevice;
  if (name == "edge") return Role::kEdge;
  if (name == "cloud") return Role::kCloud;
  Fail(ErrorCode::kInvalidInput, "unknown tier '" + std::string(name) + "'");
}

std::string_view ModeName(Mode mode) {
  return mode == Mode::kSequential ? "sequential" : "pipelined";
}

Mode ParseMode(std::string_view name) {
  if (name == "sequential") return Mode::kSequential;
  if (name == "pipelined") return Mode::kPipelined;
  Fail(ErrorCode::kInvalidInput, "unknown mode '" + std::string(name) + "'");
}

std::map<Role, double> DefaultComputeCosts() {
  return {{Role::kDevice, 0.010}, {Role::kEdge, 0.030}, {Role::kCloud, 0.050}};
}

void ValidateProtocolConfig(const ProtocolConfig& cfg) {
  Require(cfg.draft_len >= 1, ErrorCode::kInvalidInput, "draft length must be at least 1");
  Require(cfg.tiers.size() >= 2 && cfg.tiers.size() <= 3, ErrorCode::kInvalidInput,
          "protocol needs two or three tiers");
  for (Role r : cfg.tiers) {
    const double c = CostOf(cfg, r);
    Require(c > 0.0 && std::isfinite(c), ErrorCode::kInvalidInput,
            "compute cost for " + std::string(RoleName(r)) + " must be positive");
  }
  if (cfg.mode == Mode::kPipelined)
    Require(cfg.tiers.size() == 2, ErrorCode::kInvalidInput,
            "pipelined mode is defined for two tiers");
}

std::string DecodeTranscript::BoundaryName(std::size_t boundary) const {
  Require(boundary < num_boundaries(), ErrorCode::kInvalidInput, "boundary out of range");
  return std::string(RoleName(tiers[boundary])) + "-" + std::string(RoleName(tiers[boundary + 1]));
}

TranscriptTotals DecodeTranscript::TotalsFor(std::size_t boundary) const {
  TranscriptTotals t;
  for (const RoundRecord& r : rounds) {
    if (r.boundary != boundary) continue;
    ++t.rounds;
    t.drafted += r.drafted;
    t.accepted += r.accepted;
    t.rejected += r.corrected ? 1 : 0;
  }
  return t;
}

double DecodeTranscript::AcceptanceRate(std::size_t boundary) const {
  const TranscriptTotals t = TotalsFor(boundary);
  return t.drafted == 0 ? 0.0 : static_cast<double>(t.accepted) / static_cast<double>(t.drafted);
}

RoundOutcome RunRound(std::span<const TokenModel* const> models, std::span<const Token> context,
                      std::size_t gamma, std::span<const UniformSource> sources) {
  std::vector<Token> work(context.begin(), context.end());
  return RunRoundInPlace(models, work, gamma, sources);
}

DecodeTranscript RunSequential(const ProtocolConfig& cfg,
                               std::span<const TokenModel* const> models,
                               std::span<const Token> prompt, std::size_t num_tokens, Rng& rng) {
  ValidateProtocolConfig(cfg);
  Require(models.size() == cfg.tiers.size(), ErrorCode::kInvalidInput,
          "need one model per tier");
  for (const TokenModel* m : models) CheckPrompt(prompt, m->vocab_size());
  const std::uint64_t master = rng.NextU64();
  DecodeTranscript t;
  t.tiers = cfg.tiers;
  std::vector<Token> context(prompt.begin(), prompt.end());
  for (std::size_t round = 0; t.tokens.size() < num_tokens; ++round) {
    const std::uint64_t c = t.tokens.size();
    std::vector<Rng> streams;
    streams.push_back(Rng::Derive(master, {kDraftStream, c}));
    for (std::size_t b = 0; b + 1 < cfg.tiers.size(); ++b)
      streams.push_back(Rng::Derive(master, {kVerifyStream + b, c}));
    std::vector<UniformSource> sources;
    for (Rng& s : streams) sources.push_back(FromRng(s));

    // The last round drafts only what is still needed, so nothing overshoots.
    const std::size_t gamma = std::min(cfg.draft_len, num_tokens - t.tokens.size());
    const RoundOutcome outcome = RunRoundInPlace(models, context, gamma, sources);
    for (std::size_t b = 0; b < outcome.boundaries.size(); ++b) {
      const BoundaryOutcome& o = outcome.boundaries[b];
      t.rounds.push_back({round, b, o.drafted, o.accepted, o.corrected});
    }
    t.tokens.insert(t.tokens.end(), outcome.tokens.begin(), outcome.tokens.end());
    context.insert(context.end(), outcome.tokens.begin(), outcome.tokens.end());
  }
  t.totals = t.TotalsFor(cfg.tiers.size() - 2);
  return t;
}

DecodeTranscript RunStandalone(Role role, const TokenModel& model, std::span<const Token> prompt,
                               std::size_t num_tokens, Rng& rng, std::size_t chunk) {
  Require(chunk >= 1, ErrorCode::kInvalidInput, "chunk must be at least 1");
  CheckPrompt(prompt, model.vocab_size());
  const std::uint64_t master = rng.NextU64();
  DecodeTranscript t;
  t.tiers = {role};
  std::vector<Token> context(prompt.begin(), prompt.end());
  while (t.tokens.size() < num_tokens) {
    Rng stream = Rng::Derive(master, {kDraftStream, t.tokens.size()});
    for (std::size_t i = 0; i < chunk && t.tokens.size() < num_tokens; ++i) {
      const Token tok = toylm::Sample(model.Predict(context), stream);
      t.tokens.push_back(tok);
      context.push_back(tok);
    }
  }
  return t;
}

std::size_t DraftMessageBytes(std::size_t num_tokens) { return kFrameBytes + kTokenBytes * num_tokens; }

std::size_t ResultMessageBytes(bool corrected) {
  return kFrameBytes + kTokenBytes + (corrected ? kTokenBytes : 0);
}

std::size_t PipelineSchedule(const ProtocolConfig& cfg) {
  const double device = CostOf(cfg, cfg.tiers.at(0));
  const double edge = CostOf(cfg, cfg.tiers.at(1));
  Require(device > 0.0 && edge > 0.0, ErrorCode::kInvalidInput, "costs must be positive");
  return static_cast<std::size_t>(std::max(1.0, std::round(edge / device)));
}

double ScheduleSequential(const ProtocolConfig& cfg, const DecodeTranscript& transcript,
                          ProtocolClock& clock) {
  ValidateProtocolConfig(cfg);
  Require(transcript.tiers == cfg.tiers, ErrorCode::kInvalidInput,
          "transcript tiers do not match the protocol");
  const auto& tiers = cfg.tiers;
  double t = 0.0;
  for (const auto& recs : ByRound(transcript)) {
    double ready = clock.Compute(tiers[0], t, recs[0].drafted * CostOf(cfg, tiers[0]), "draft");
    for (std::size_t b = 0; b < recs.size(); ++b) {
      ready = clock.Transmit(tiers[b], tiers[b + 1], ready, DraftMessageBytes(recs[b].drafted),
                             "draft");
      ready = clock.Compute(tiers[b + 1], ready, CostOf(cfg, tiers[b + 1]), "verify");
    }
    // The result travels back down the chain to the device.
    const bool corrected = recs.back().corrected;
    for (std::size_t b = recs.size(); b-- > 0;)
      ready = clock.Transmit(tiers[b + 1], tiers[b], ready, ResultMessageBytes(corrected), "result");
    t = ready;
  }
  return t;
}

double SchedulePipelined(const ProtocolConfig& cfg, const DecodeTranscript& transcript,
                         ProtocolClock& clock) {
  ValidateProtocolConfig(cfg);
  Require(cfg.tiers.size() == 2, ErrorCode::kInvalidInput, "pipelined mode is defined for two tiers");
  Require(transcript.tiers == cfg.tiers, ErrorCode::kInvalidInput,
          "transcript tiers do not match the protocol");
  const Role dev = cfg.tiers[0];
  const Role ver = cfg.tiers[1];
  const double token_cost = CostOf(cfg, dev);
  const double verify_cost = CostOf(cfg, ver);
  const auto rounds = ByRound(transcript);
  const std::size_t total = transcript.tokens.size();

  double start = 0.0;
  double verifier_free = 0.0;
  double prev_result = 0.0;
  double wall = 0.0;
  std::size_t committed = 0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const RoundRecord& rec = rounds[i][0];
    const double drafted =
        clock.Compute(dev, start, token_cost * static_cast<double>(rec.drafted), "draft");
    const double arrived = clock.Transmit(dev, ver, drafted, DraftMessageBytes(rec.drafted), "draft");
    const double verified =
        clock.Compute(ver, std::max(arrived, verifier_free), verify_cost, "verify");
    verifier_free = verified;
    const double result =
        clock.Transmit(ver, dev, verified, ResultMessageBytes(rec.corrected), "result");
    wall = result;
    if (i + 1 == rounds.size()) break;

    const double speculative = std::max(drafted, prev_result);
    if (!rec.corrected) {
      start = speculative;
    } else {
      // The speculative batch assumed all of batch i would be accepted.
      const std::size_t optimistic = committed + rec.drafted;
      const std::size_t spec_len = optimistic < total ? std::min(cfg.draft_len, total - optimistic) : 0;
      const double spec_cost = token_cost * static_cast<double>(spec_len);
      if (spec_len > 0 && speculative < result) {
        const double end = std::min(speculative + spec_cost, result);
        clock.Compute(dev, speculative, end - speculative, "draft-discarded");
        if (speculative + spec_cost <= result)
          clock.Transmit(dev, ver, end, DraftMessageBytes(spec_len), "draft-stale");
      }
      start = result;
    }
    committed += rec.accepted + (rec.corrected ? 1 : 0);
    prev_result = result;
  }
  return wall;
}

double ScheduleStandalone(Role role, double cost_per_token, std::size_t num_tokens,
                          ProtocolClock& clock) {
  Require(cost_per_token > 0.0, ErrorCode::kInvalidInput, "cost must be positive");
  double t = 0.0;
  for (std::size_t i = 0; i < num_tokens; ++i) t = clock.Compute(role, t, cost_per_token, "decode");
  return t;
}

TimedTranscript RunPipelined(const ProtocolConfig& cfg, std::span<const TokenModel* const> models,
                             std::span<const Token> prompt, std::size_t num_tokens, Rng& rng,
                             ProtocolClock& clock) {
  ProtocolConfig pcfg = cfg;
  pcfg.mode = Mode::kPipelined;
  TimedTranscript out;
  out.transcript = RunSequential(pcfg, models, prompt, num_tokens, rng);
  out.wall_s = SchedulePipelined(pcfg, out.transcript, clock);
  return out;
}

std::string TranscriptToJson(const DecodeTranscript& t) {
  nlohmann::json j;
  j["tiers"] = nlohmann::json::array();
  for (Role r : t.tiers) j["tiers"].push_back(RoleName(r));
  j["tokens"] = t.tokens;
  j["rounds"] = nlohmann::json::array();
  for (const RoundRecord& r : t.rounds) {
    j["rounds"].push_back({{"round", r.round},
                           {"boundary", t.BoundaryName(r.boundary)},
                           {"drafted", r.drafted},
                           {"accepted", r.accepted},
                           {"corrected", r.corrected}});
  }
  j["totals"] = {{"rounds", t.totals.rounds},
                 {"drafted", t.totals.drafted},
                 {"accepted", t.totals.accepted},
                 {"rejected", t.totals.rejected},
                 {"emitted", t.tokens.size()}};
  return j.dump();
}

}  // namespace aiflow::specdec
