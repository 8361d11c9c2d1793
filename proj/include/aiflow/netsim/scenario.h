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

#ifndef AIFLOW_NETSIM_SCENARIO_H_
#define AIFLOW_NETSIM_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aiflow/netsim/network.h"
#include "aiflow/specdec/decoder.h"
#include "aiflow/tofc/pipeline.h"
#include "aiflow/toylm/token_model.h"

namespace aiflow::netsim {

// Compute-cost op kinds looked up in Node::compute_cost.
inline constexpr std::string_view kOpToken = "token";              // one forward pass
inline constexpr std::string_view kOpTofcEncode = "tofc_encode";  // per input feature
inline constexpr std::string_view kOpTofcDecode = "tofc_decode";  // per merged row
inline constexpr std::string_view kOpRespond = "respond";
inline constexpr std::string_view kOpAggregate = "aggregate";

// Node override when present, otherwise the default table for the tier.
double OpCost(const Node& node, std::string_view op);

// A tier's model is the shared ToyLm cut at `exit`, optionally with a branch
// decomposed at that exit.
struct TierModel {
  std::size_t exit = 0;
  double branch_ratio = 0.0;  // 0 = no branch
};

struct SpecdecScenario {
  std::vector<Role> tiers = {Role::kDevice, Role::kEdge};
  std::size_t draft_len = 4;
  specdec::Mode mode = specdec::Mode::kSequential;
  toylm::ToyLmConfig lm;
  std::map<Role, TierModel> models;  // missing roles use DefaultTierModel
  std::vector<toylm::Token> prompt = {1, 2, 3, 4};
  std::size_t num_tokens = 64;
};

// Two tiers: device = exit L-1 with a 0.75 branch, the other tier the full
// model. Three tiers: device and edge share exit L-1 with branches of ratio
// 0.5 and 1.0, cloud runs the full model.
TierModel DefaultTierModel(Role role, const toylm::ToyLmConfig& lm, std::span<const Role> tiers);

struct FeatureSource {
  std::filesystem::path path;  // empty: synthetic smooth features
  std::size_t rows = 64;
  std::size_t dims = 8;
  std::uint64_t seed = 1;
};

Matrix LoadFeatureSource(const FeatureSource& source);

struct TofcScenario {
  FeatureSource features;
  tofc::TofcConfig tofc{.k_neighbors = 5, .num_centers = 16};
  std::size_t num_models = 4;
  std::optional<FeatureSource> calibration;  // fit on the features when absent
  Role server = Role::kEdge;
};

struct CollabScenario {
  std::size_t num_devices = 1;
  Role server = Role::kEdge;
  std::size_t request_bytes = 256;
  std::size_t response_bytes = 4096;
  std::size_t ack_bytes = 16;
  std::size_t revision_bytes = 4096;
};

struct Scenario {
  Topology topology;
  std::uint64_t seed = 0;
  std::variant<std::monostate, SpecdecScenario, TofcScenario, CollabScenario> params;
};

std::string_view ScenarioKind(const Scenario& scenario);

struct ScenarioResult {
  std::vector<TraceEvent> trace;
  MetricsRecord metrics;
  std::optional<specdec::DecodeTranscript> transcript;
  std::optional<tofc::TofcStats> tofc_stats;
};

// Builds the per-tier token models for a specdec scenario.
struct TierModels {
  std::vector<std::unique_ptr<toylm::TokenModel>> owned;
  std::vector<const toylm::TokenModel*> models;  // indexed like tiers
};
TierModels BuildTierModels(const SpecdecScenario& s);

// The decoding generator a specdec scenario run with `seed` uses.
Rng DecodeStream(std::uint64_t seed);

ScenarioResult RunSpecdecScenario(const Topology& topology, const SpecdecScenario& s,
                                  std::uint64_t seed);
ScenarioResult RunTofcScenario(const Topology& topology, const TofcScenario& s, std::uint64_t seed);
ScenarioResult RunDeviceServerCollab(const Topology& topology, const CollabScenario& s,
                                     std::uint64_t seed);
// Validates the topology and dispatches on the scenario kind; kind "none"
// yields an empty trace and zeroed metrics.
ScenarioResult RunScenario(const Scenario& scenario);

// JSON scenario documents (docs/scenario.schema.json). Syntax and type
// problems are config-errors naming the field; dangling node references are
// invalid-scenario errors.
Scenario ParseScenario(std::string_view json_text);
Scenario LoadScenario(const std::filesystem::path& path);

}  // namespace aiflow::netsim

#endif  // AIFLOW_NETSIM_SCENARIO_H_
