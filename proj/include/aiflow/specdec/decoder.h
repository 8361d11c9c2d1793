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

#ifndef AIFLOW_SPECDEC_DECODER_H_
#define AIFLOW_SPECDEC_DECODER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aiflow/numerics/rng.h"
#include "aiflow/specdec/verify.h"

namespace aiflow::specdec {

enum class Role { kDevice, kEdge, kCloud };
enum class Mode { kSequential, kPipelined };

std::string_view RoleName(Role role);
Role ParseRole(std::string_view name);
std::string_view ModeName(Mode mode);
Mode ParseMode(std::string_view name);

// Per-token compute costs in simulated seconds. A verify pass over a batch
// costs one forward, i.e. one token's worth.
std::map<Role, double> DefaultComputeCosts();

struct ProtocolConfig {
  std::size_t draft_len = 4;
  std::vector<Role> tiers = {Role::kDevice, Role::kEdge};
  std::map<Role, double> compute_cost = DefaultComputeCosts();
  Mode mode = Mode::kSequential;
};

void ValidateProtocolConfig(const ProtocolConfig& cfg);

// One tier boundary within one round. Boundary 0 is tiers[0] -> tiers[1].
struct RoundRecord {
  std::size_t round = 0;
  std::size_t boundary = 0;
  std::size_t drafted = 0;
  std::size_t accepted = 0;
  bool corrected = false;
};

// Totals over the output boundary (the last one), whose accepted tokens and
// corrections are exactly the emitted tokens.
struct TranscriptTotals {
  std::size_t rounds = 0;
  std::size_t drafted = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct DecodeTranscript {
  std::vector<Role> tiers;
  std::vector<Token> tokens;
  std::vector<RoundRecord> rounds;
  TranscriptTotals totals;

  std::size_t num_boundaries() const { return tiers.size() < 2 ? 0 : tiers.size() - 1; }
  std::string BoundaryName(std::size_t boundary) const;
  TranscriptTotals TotalsFor(std::size_t boundary) const;
  // accepted / drafted at a boundary; 0 when nothing was drafted.
  double AcceptanceRate(std::size_t boundary = 0) const;
};

struct BoundaryOutcome {
  std::size_t drafted = 0;
  std::size_t accepted = 0;
  bool corrected = false;
};

struct RoundOutcome {
  std::vector<Token> tokens;
  std::vector<BoundaryOutcome> boundaries;
};

// One draft-then-verify round. `models` and `sources` are indexed by tier:
// sources[0] drives drafting, sources[b] the verification at boundary b-1.
// With three tiers the edge-verified stream is the draft for the cloud, using
// the edge distributions as p_d.
RoundOutcome RunRound(std::span<const TokenModel* const> models, std::span<const Token> context,
                      std::size_t gamma, std::span<const UniformSource> sources);

// Emits exactly num_tokens tokens. One master seed is taken from `rng`; each
// round uses streams keyed by (role, tokens committed when the round starts),
// so a pipelined schedule commits the same tokens as a sequential one.
DecodeTranscript RunSequential(const ProtocolConfig& cfg,
                               std::span<const TokenModel* const> models,
                               std::span<const Token> prompt, std::size_t num_tokens, Rng& rng);

// Single-model decoding with the drafting stream discipline: every `chunk`
// tokens starting at committed length c come from the stream keyed (draft, c).
// With chunk = draft_len this reproduces the drafts a device would make.
DecodeTranscript RunStandalone(Role role, const TokenModel& model, std::span<const Token> prompt,
                               std::size_t num_tokens, Rng& rng, std::size_t chunk = 1);

// Pins the wire format: a 16-byte frame plus 4 bytes per token index.
inline constexpr std::size_t kFrameBytes = 16;
inline constexpr std::size_t kTokenBytes = 4;
std::size_t DraftMessageBytes(std::size_t num_tokens);
// Accepted count plus the correction token when there is one.
std::size_t ResultMessageBytes(bool corrected);

// Simulated time source. Implementations record the activity and return
// the completion (or arrival) time.
class ProtocolClock {
 public:
  virtual ~ProtocolClock() = default;
  virtual double Compute(Role role, double start, double seconds, std::string_view label) = 0;
  virtual double Transmit(Role from, Role to, double send_time, std::size_t bytes,
                          std::string_view label) = 0;
};

// gamma* = max(1, round(edge forward cost / device per-token cost)).
std::size_t PipelineSchedule(const ProtocolConfig& cfg);

// Replays a transcript on the clock and returns the simulated wall time.
double ScheduleSequential(const ProtocolConfig& cfg, const DecodeTranscript& transcript,
                          ProtocolClock& clock);
// Two tiers only. The device drafts at most one batch ahead: batch i+1 starts
// at max(end of draft i, result arrival of batch i-1). A rejection discards
// the speculative batch (stale drafts are dropped by the verifier) and the
// device restarts when the result arrives.
double SchedulePipelined(const ProtocolConfig& cfg, const DecodeTranscript& transcript,
                         ProtocolClock& clock);
double ScheduleStandalone(Role role, double cost_per_token, std::size_t num_tokens,
                          ProtocolClock& clock);

struct TimedTranscript {
  DecodeTranscript transcript;
  double wall_s = 0.0;
};

TimedTranscript RunPipelined(const ProtocolConfig& cfg, std::span<const TokenModel* const> models,
                             std::span<const Token> prompt, std::size_t num_tokens, Rng& rng,
                             ProtocolClock& clock);

std::string TranscriptToJson(const DecodeTranscript& transcript);

}  // namespace aiflow::specdec

#endif  // AIFLOW_SPECDEC_DECODER_H_
