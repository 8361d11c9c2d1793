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

#include "aiflow/netsim/scenario.h"

#include <algorithm>
#include <limits>

#include "aiflow/error.h"
#include "aiflow/io/binary.h"
#include "json.hpp"

namespace aiflow::netsim {
namespace {

using nlohmann::json;

constexpr std::uint64_t kDecodeStreamKey = 0x5DEC;

void CheckTierNodes(const Topology& topology, std::span<const Role> chain) {
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Node* n = topology.NodeForTier(chain[i]);
    Require(n != nullptr, ErrorCode::kInvalidScenario,
            "topology has no " + std::string(specdec::RoleName(chain[i])) + " node");
    if (i == 0) continue;
    const Node* prev = topology.NodeForTier(chain[i - 1]);
    Require(topology.FindLink(prev->id, n->id).has_value(), ErrorCode::kInvalidScenario,
            "no link between '" + prev->id + "' and '" + n->id + "'");
  }
}

// ---- JSON helpers: every failure names the offending field.

[[noreturn]] void BadField(const std::string& path, const std::string& what) {
  Fail(ErrorCode::kConfigError, "field '" + path + "': " + what);
}

std::string Join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

const json& RequireObject(const json& j, const std::string& path) {
  if (!j.is_object()) BadField(path.empty() ? "<root>" : path, "expected an object");
  return j;
}

const json* Member(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const json& RequireMember(const json& obj, std::string_view key, const std::string& path) {
  const json* m = Member(obj, key);
  if (m == nullptr) BadField(Join(path, key), "missing");
  return *m;
}

std::uint64_t AsU64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    BadField(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::size_t AsCount(const json& j, const std::string& path) {
  return static_cast<std::size_t>(AsU64(j, path));
}

double AsReal(const json& j, const std::string& path) {
  if (!j.is_number()) BadField(path, "expected a number");
  return j.get<double>();
}

std::string AsString(const json& j, const std::string& path) {
  if (!j.is_string()) BadField(path, "expected a string");
  return j.get<std::string>();
}

Role AsRole(const json& j, const std::string& path) {
  const std::string name = AsString(j, path);
  try {
    return specdec::ParseRole(name);
  } catch (const Error&) {
    BadField(path, "unknown tier '" + name + "' (device, edge, cloud)");
  }
}

template <typename T, typename Fn>
void Optional(const json& obj, std::string_view key, const std::string& path, T& target, Fn convert) {
  if (const json* m = Member(obj, key)) target = convert(*m, Join(path, key));
}

Node ParseNode(const json& j, const std::string& path) {
  RequireObject(j, path);
  Node n;
  n.id = AsString(RequireMember(j, "id", path), Join(path, "id"));
  n.tier = AsRole(RequireMember(j, "tier", path), Join(path, "tier"));
  if (const json* costs = Member(j, "compute_cost")) {
    const std::string cpath = Join(path, "compute_cost");
    RequireObject(*costs, cpath);
    for (const auto& [op, v] : costs->items()) n.compute_cost[op] = AsReal(v, Join(cpath, op));
  }
  return n;
}

Link ParseLink(const json& j, const std::string& path) {
  RequireObject(j, path);
  Link l;
  l.from = AsString(RequireMember(j, "from", path), Join(path, "from"));
  l.to = AsString(RequireMember(j, "to", path), Join(path, "to"));
  l.latency_s = AsReal(RequireMember(j, "latency_s", path), Join(path, "latency_s"));
  l.bandwidth_bytes_per_s =
      AsReal(RequireMember(j, "bandwidth_bytes_per_s", path), Join(path, "bandwidth_bytes_per_s"));
  Optional(j, "jitter_s", path, l.jitter_s, AsReal);
  Optional(j, "seed", path, l.seed, AsU64);
  return l;
}

Topology ParseTopology(const json& j, const std::string& path) {
  RequireObject(j, path);
  Topology t;
  const json& nodes = RequireMember(j, "nodes", path);
  if (!nodes.is_array()) BadField(Join(path, "nodes"), "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    t.nodes.push_back(ParseNode(nodes[i], Join(path, "nodes") + "[" + std::to_string(i) + "]"));
  if (const json* links = Member(j, "links")) {
    if (!links->is_array()) BadField(Join(path, "links"), "expected an array");
    for (std::size_t i = 0; i < links->size(); ++i)
      t.links.push_back(ParseLink((*links)[i], Join(path, "links") + "[" + std::to_string(i) + "]"));
  }
  return t;
}

FeatureSource ParseFeatureSource(const json& j, const std::string& path) {
  RequireObject(j, path);
  FeatureSource f;
  Optional(j, "path", path, f.path,
           [](const json& v, const std::string& p) { return std::filesystem::path(AsString(v, p)); });
  Optional(j, "rows", path, f.rows, AsCount);
  Optional(j, "dims", path, f.dims, AsCount);
  Optional(j, "seed", path, f.seed, AsU64);
  return f;
}

SpecdecScenario ParseSpecdec(const json& j, const std::string& path) {
  SpecdecScenario s;
  if (const json* tiers = Member(j, "tiers")) {
    if (!tiers->is_array()) BadField(Join(path, "tiers"), "expected an array");
    s.tiers.clear();
    for (std::size_t i = 0; i < tiers->size(); ++i)
      s.tiers.push_back(AsRole((*tiers)[i], Join(path, "tiers") + "[" + std::to_string(i) + "]"));
  }
  Optional(j, "draft_len", path, s.draft_len, AsCount);
  Optional(j, "mode", path, s.mode, [](const json& v, const std::string& p) {
    const std::string name = AsString(v, p);
    try {
      return specdec::ParseMode(name);
    } catch (const Error&) {
      BadField(p, "unknown mode '" + name + "' (sequential, pipelined)");
    }
  });
  Optional(j, "num_tokens", path, s.num_tokens, AsCount);
  if (const json* prompt = Member(j, "prompt")) {
    if (!prompt->is_array()) BadField(Join(path, "prompt"), "expected an array");
    s.prompt.clear();
    for (std::size_t i = 0; i < prompt->size(); ++i) {
      const std::uint64_t t = AsU64((*prompt)[i], Join(path, "prompt") + "[" + std::to_string(i) + "]");
      if (t > std::numeric_limits<toylm::Token>::max())
        BadField(Join(path, "prompt"), "token out of range");
      s.prompt.push_back(static_cast<toylm::Token>(t));
    }
  }
  if (const json* lm = Member(j, "lm")) {
    const std::string lpath = Join(path, "lm");
    RequireObject(*lm, lpath);
    Optional(*lm, "vocab_size", lpath, s.lm.vocab_size, AsCount);
    Optional(*lm, "embed_dim", lpath, s.lm.embed_dim, AsCount);
    Optional(*lm, "num_layers", lpath, s.lm.num_layers, AsCount);
    Optional(*lm, "context_window", lpath, s.lm.context_window, AsCount);
    Optional(*lm, "seed", lpath, s.lm.seed, AsU64);
  }
  if (const json* models = Member(j, "models")) {
    const std::string mpath = Join(path, "models");
    RequireObject(*models, mpath);
    for (const auto& [name, v] : models->items()) {
      const std::string rpath = Join(mpath, name);
      const Role role = AsRole(json(name), rpath);
      RequireObject(v, rpath);
      TierModel tm;
      tm.exit = AsCount(RequireMember(v, "exit", rpath), Join(rpath, "exit"));
      Optional(v, "branch_ratio", rpath, tm.branch_ratio, AsReal);
      s.models[role] = tm;
    }
  }
  return s;
}

TofcScenario ParseTofc(const json& j, const std::string& path) {
  TofcScenario s;
  Optional(j, "features", path, s.features, ParseFeatureSource);
  if (const json* c = Member(j, "calibration")) s.calibration = ParseFeatureSource(*c, Join(path, "calibration"));
  Optional(j, "k_neighbors", path, s.tofc.k_neighbors, AsCount);
  Optional(j, "num_centers", path, s.tofc.num_centers, AsCount);
  Optional(j, "num_models", path, s.num_models, AsCount);
  Optional(j, "server", path, s.server, AsRole);
  return s;
}

CollabScenario ParseCollab(const json& j, const std::string& path) {
  CollabScenario s;
  Optional(j, "num_devices", path, s.num_devices, AsCount);
  Optional(j, "server", path, s.server, AsRole);
  Optional(j, "request_bytes", path, s.request_bytes, AsCount);
  Optional(j, "response_bytes", path, s.response_bytes, AsCount);
  Optional(j, "ack_bytes", path, s.ack_bytes, AsCount);
  Optional(j, "revision_bytes", path, s.revision_bytes, AsCount);
  return s;
}

}  // namespace

double OpCost(const Node& node, std::string_view op) {
  if (const auto it = node.compute_cost.find(std::string(op)); it != node.compute_cost.end())
    return it->second;
  if (op == kOpToken) return specdec::DefaultComputeCosts().at(node.tier);
  if (op == kOpTofcEncode) return 0.0005;
  if (op == kOpTofcDecode) return 0.002;
  if (op == kOpRespond) return 0.25;
  if (op == kOpAggregate) return 0.1;
  Fail(ErrorCode::kInvalidScenario, "node '" + node.id + "' has no cost for '" + std::string(op) + "'");
}

TierModel DefaultTierModel(Role role, const toylm::ToyLmConfig& lm, std::span<const Role> tiers) {
  const std::size_t depth = lm.num_layers;
  if (depth < 2 || role == Role::kCloud) return TierModel{depth, 0.0};
  const bool three = tiers.size() >= 3;
  if (role == Role::kDevice) return TierModel{depth - 1, three ? 0.5 : 0.75};
  return three ? TierModel{depth - 1, 1.0} : TierModel{depth, 0.0};
}

Matrix LoadFeatureSource(const FeatureSource& source) {
  if (!source.path.empty()) return tofc::LoadFeatures(source.path);
  return tofc::SmoothFeatures(source.rows, source.dims, source.seed);
}

std::string_view ScenarioKind(const Scenario& scenario) {
  switch (scenario.params.index()) {
    case 1:
      return "specdec";
    case 2:
      return "tofc";
    case 3:
      return "collab";
    default:
      return "none";
  }
}

Rng DecodeStream(std::uint64_t seed) { return Rng::Derive(seed, {kDecodeStreamKey}); }

TierModels BuildTierModels(const SpecdecScenario& s) {
  const auto base = std::make_shared<const toylm::ToyLm>(toylm::ToyLm::Build(s.lm));
  TierModels out;
  for (Role role : s.tiers) {
    const auto it = s.models.find(role);
    const TierModel tm = it != s.models.end() ? it->second : DefaultTierModel(role, s.lm, s.tiers);
    std::shared_ptr<const toylm::ToyLm> lm = base;
    if (tm.branch_ratio > 0.0)
      lm = std::make_shared<const toylm::ToyLm>(
          base->AttachBranch(tm.exit, tm.branch_ratio, base->CalibrationContext(tm.exit)));
    out.owned.push_back(std::make_unique<toylm::ToyLmExit>(lm, tm.exit));
    out.models.push_back(out.owned.back().get());
  }
  return out;
}

ScenarioResult RunSpecdecScenario(const Topology& topology, const SpecdecScenario& s,
                                  std::uint64_t seed) {
  ValidateTopology(topology);
  Require(!s.tiers.empty(), ErrorCode::kInvalidScenario, "specdec scenario needs tiers");
  CheckTierNodes(topology, s.tiers);

  specdec::ProtocolConfig cfg;
  cfg.draft_len = s.draft_len;
  cfg.tiers = s.tiers;
  cfg.mode = s.mode;
  for (Role role : s.tiers) cfg.compute_cost[role] = OpCost(*topology.NodeForTier(role), kOpToken);
  if (s.tiers.size() > 1) specdec::ValidateProtocolConfig(cfg);
  const TierModels tm = BuildTierModels(s);

  ScenarioResult out;
  EventLoop loop;
  Network net(topology, seed, loop, out.metrics);
  NetworkClock clock(net);
  Rng rng = DecodeStream(seed);
  double wall = 0.0;
  if (s.tiers.size() == 1) {
    out.transcript = specdec::RunStandalone(s.tiers[0], *tm.models[0], s.prompt, s.num_tokens, rng);
    wall = specdec::ScheduleStandalone(s.tiers[0], cfg.compute_cost.at(s.tiers[0]), s.num_tokens, clock);
  } else if (s.mode == specdec::Mode::kSequential) {
    out.transcript = specdec::RunSequential(cfg, tm.models, s.prompt, s.num_tokens, rng);
    wall = specdec::ScheduleSequential(cfg, *out.transcript, clock);
  } else {
    specdec::TimedTranscript timed =
        specdec::RunPipelined(cfg, tm.models, s.prompt, s.num_tokens, rng, clock);
    out.transcript = std::move(timed.transcript);
    wall = timed.wall_s;
  }
  loop.Run();
  out.trace = loop.trace();
  out.metrics.tokens_emitted = out.transcript->tokens.size();
  out.metrics.simulated_wall_s = wall;
  out.metrics.acceptance_rate = s.tiers.size() > 1 ? out.transcript->AcceptanceRate(0) : 0.0;
  return out;
}

ScenarioResult RunTofcScenario(const Topology& topology, const TofcScenario& s, std::uint64_t seed) {
  ValidateTopology(topology);
  const Role chain[] = {Role::kDevice, s.server};
  CheckTierNodes(topology, chain);
  const Node& device = *topology.NodeForTier(Role::kDevice);
  const Node& server = *topology.NodeForTier(s.server);

  const Matrix features = LoadFeatureSource(s.features);
  const Matrix calib = s.calibration ? LoadFeatureSource(*s.calibration) : features;
  Require(calib.cols() == features.cols(), ErrorCode::kInvalidInput,
          "calibration features have " + std::to_string(calib.cols()) + " dims, features have " +
              std::to_string(features.cols()));
  const std::vector<tofc::LaplacianModel> models = tofc::FitModelBank(calib, s.num_models);
  const tofc::TofcResult r = tofc::RunTofcPipeline(features, s.tofc, models);

  ScenarioResult out;
  EventLoop loop;
  Network net(topology, seed, loop, out.metrics);
  double t = net.Compute(device, 0.0, OpCost(device, kOpTofcEncode) * features.rows(), "tofc-encode");
  t = net.Send(device, server, t, r.bitstream.size() + specdec::kFrameBytes, "tofc-bitstream");
  const tofc::DecodedBitstream decoded = tofc::DecodeBitstream(r.bitstream, models);
  Require(decoded.symbols == r.symbols, ErrorCode::kInternal, "server decoded different symbols");
  t = net.Compute(server, t, OpCost(server, kOpTofcDecode) * r.symbols.rows, "tofc-decode");
  loop.Run();
  out.trace = loop.trace();
  out.metrics.simulated_wall_s = t;
  out.tofc_stats = r.stats;
  return out;
}

ScenarioResult RunDeviceServerCollab(const Topology& topology, const CollabScenario& s,
                                     std::uint64_t seed) {
  ValidateTopology(topology);
  Require(s.num_devices >= 1, ErrorCode::kInvalidScenario, "collab needs at least one device");
  const Node* server = topology.NodeForTier(s.server);
  Require(server != nullptr && s.server != Role::kDevice, ErrorCode::kInvalidScenario,
          "collab needs an edge or cloud server node");
  std::vector<const Node*> devices;
  for (const Node& n : topology.nodes)
    if (n.tier == Role::kDevice && devices.size() < s.num_devices) devices.push_back(&n);
  Require(devices.size() == s.num_devices, ErrorCode::kInvalidScenario,
          "collab asks for " + std::to_string(s.num_devices) + " devices, topology has " +
              std::to_string(devices.size()));
  for (const Node* d : devices)
    Require(topology.FindLink(d->id, server->id).has_value(), ErrorCode::kInvalidScenario,
            "no link between '" + d->id + "' and '" + server->id + "'");

  ScenarioResult out;
  EventLoop loop;
  Network net(topology, seed, loop, out.metrics);
  std::size_t arrived = 0;

  // (4) revisions go back to every device once aggregation finishes.
  auto aggregate = [&] {
    for (const Node* d : devices) net.Send(*server, *d, loop.now(), s.ack_bytes, "aggregate-ack");
    net.Compute(*server, loop.now(), OpCost(*server, kOpAggregate), "aggregate", [&] {
      for (const Node* d : devices) net.Send(*server, *d, loop.now(), s.revision_bytes, "revision");
    });
  };
  // (2) each selected device answers; (3) aggregation waits for all answers.
  auto on_response = [&] {
    if (++arrived == devices.size())
      loop.Schedule(loop.now(), EventKind::kScenarioStep, server->id, server->id, 0, "aggregate-start",
                    aggregate);
  };
  // (1) the server selects every device and sends it the request.
  loop.Schedule(0.0, EventKind::kScenarioStep, server->id, server->id, 0, "select", [&] {
    for (const Node* d : devices) {
      net.Send(*server, *d, loop.now(), s.request_bytes, "request", [&, d] {
        net.Compute(*d, loop.now(), OpCost(*d, kOpRespond), "respond", [&, d] {
          net.Send(*d, *server, loop.now(), s.response_bytes, "response", on_response);
        });
      });
    }
  });
  loop.Run();
  out.trace = loop.trace();
  out.metrics.simulated_wall_s = loop.now();
  return out;
}

ScenarioResult RunScenario(const Scenario& scenario) {
  ValidateTopology(scenario.topology);
  return std::visit(
      [&](const auto& p) -> ScenarioResult {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SpecdecScenario>) {
          return RunSpecdecScenario(scenario.topology, p, scenario.seed);
        } else if constexpr (std::is_same_v<P, TofcScenario>) {
          return RunTofcScenario(scenario.topology, p, scenario.seed);
        } else if constexpr (std::is_same_v<P, CollabScenario>) {
          return RunDeviceServerCollab(scenario.topology, p, scenario.seed);
        } else {
          return ScenarioResult{};
        }
      },
      scenario.params);
}

Scenario ParseScenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kConfigError, std::string("scenario is not valid JSON: ") + e.what());
  }
  RequireObject(doc, "");
  Scenario out;
  if (const json* v = Member(doc, "version"); v != nullptr && AsU64(*v, "version") != 1)
    BadField("version", "unsupported version");
  out.topology = ParseTopology(RequireMember(doc, "topology", ""), "topology");
  Optional(doc, "seed", "", out.seed, AsU64);
  const json& sc = RequireObject(RequireMember(doc, "scenario", ""), "scenario");
  const std::string kind = AsString(RequireMember(sc, "kind", "scenario"), "scenario.kind");
  if (kind == "specdec") {
    out.params = ParseSpecdec(sc, "scenario");
  } else if (kind == "tofc") {
    out.params = ParseTofc(sc, "scenario");
  } else if (kind == "collab") {
    out.params = ParseCollab(sc, "scenario");
  } else if (kind != "none") {
    BadField("scenario.kind", "unknown kind '" + kind + "' (specdec, tofc, collab, none)");
  }
  ValidateTopology(out.topology);
  return out;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  return ParseScenario(ReadFileText(path));
}

}  // namespace aiflow::netsim
