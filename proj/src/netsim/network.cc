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

#include "aiflow/netsim/network.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "aiflow/error.h"
#include "json.hpp"

namespace aiflow::netsim {
namespace {

std::string Real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const Node* Topology::FindNode(std::string_view id) const {
  for (const Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const Node* Topology::NodeForTier(Role tier) const {
  for (const Node& n : nodes)
    if (n.tier == tier) return &n;
  return nullptr;
}

std::optional<std::size_t> Topology::FindLink(std::string_view a, std::string_view b) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if ((l.from == a && l.to == b) || (l.from == b && l.to == a)) return i;
  }
  return std::nullopt;
}

void ValidateTopology(const Topology& topology) {
  std::set<std::string> ids;
  for (const Node& n : topology.nodes) {
    Require(!n.id.empty(), ErrorCode::kInvalidScenario, "node with empty id");
    Require(ids.insert(n.id).second, ErrorCode::kInvalidScenario, "duplicate node id '" + n.id + "'");
    for (const auto& [op, cost] : n.compute_cost)
      Require(std::isfinite(cost) && cost >= 0.0, ErrorCode::kInvalidScenario,
              "node '" + n.id + "' has a bad cost for '" + op + "'");
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const Link& l : topology.links) {
    const std::string name = "link " + l.from + "-" + l.to;
    Require(ids.contains(l.from), ErrorCode::kInvalidScenario, name + ": unknown node '" + l.from + "'");
    Require(ids.contains(l.to), ErrorCode::kInvalidScenario, name + ": unknown node '" + l.to + "'");
    Require(l.from != l.to, ErrorCode::kInvalidScenario, name + ": self loop");
    Require(pairs.insert(std::minmax(l.from, l.to)).second, ErrorCode::kInvalidScenario,
            name + ": duplicate link");
    Require(std::isfinite(l.latency_s) && l.latency_s > 0.0, ErrorCode::kInvalidScenario,
            name + ": latency must be positive");
    Require(std::isfinite(l.bandwidth_bytes_per_s) && l.bandwidth_bytes_per_s > 0.0,
            ErrorCode::kInvalidScenario, name + ": bandwidth must be positive");
    Require(std::isfinite(l.jitter_s) && l.jitter_s >= 0.0, ErrorCode::kInvalidScenario,
            name + ": jitter must be non-negative");
  }
}

double TransmitTime(std::size_t bytes, const Link& link, Rng& rng) {
  double t = link.latency_s + static_cast<double>(bytes) / link.bandwidth_bytes_per_s;
  if (link.jitter_s > 0.0) t += (2.0 * rng.Uniform() - 1.0) * link.jitter_s;
  return std::max(t, 0.0);
}

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kComputeDone:
      return "compute-done";
    case EventKind::kMessageDelivered:
      return "message-delivered";
    case EventKind::kScenarioStep:
      return "scenario-step";
  }
  return "unknown";
}

std::uint64_t EventLoop::Schedule(double time, EventKind kind, std::string src, std::string dst,
                                  std::size_t bytes, std::string label, Handler handler) {
  Require(std::isfinite(time) && time >= now_, ErrorCode::kInternal,
          "event '" + label + "' scheduled in the past");
  const std::uint64_t seq = next_seq_++;
  queue_.push(Pending{TraceEvent{time, seq, kind, std::move(src), std::move(dst), bytes,
                                 std::move(label)},
                      std::move(handler)});
  return seq;
}

void EventLoop::Run() {
  while (!queue_.empty()) {
    Pending p = queue_.top();
    queue_.pop();
    now_ = p.event.time;
    trace_.push_back(p.event);
    if (p.handler) p.handler();
  }
}

std::string TraceToJsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const TraceEvent& e : trace) {
    // Keys in a fixed order; strings escaped by the JSON library.
    out += "{\"t\":" + Real(e.time) + ",\"seq\":" + std::to_string(e.seq) +
           ",\"kind\":" + nlohmann::json(std::string(EventKindName(e.kind))).dump() +
           ",\"src\":" + nlohmann::json(e.src).dump() + ",\"dst\":" + nlohmann::json(e.dst).dump() +
           ",\"bytes\":" + std::to_string(e.bytes) + ",\"label\":" + nlohmann::json(e.label).dump() +
           "}\n";
  }
  return out;
}

std::string MetricsToJson(const MetricsRecord& m) {
  return "{\"tokens_emitted\":" + std::to_string(m.tokens_emitted) +
         ",\"simulated_wall_s\":" + Real(m.simulated_wall_s) +
         ",\"device_compute_s\":" + Real(m.device_compute_s) + ",\"transmit_s\":" + Real(m.transmit_s) +
         ",\"server_compute_s\":" + Real(m.server_compute_s) +
         ",\"bytes_up\":" + std::to_string(m.bytes_up) + ",\"bytes_down\":" + std::to_string(m.bytes_down) +
         ",\"acceptance_rate\":" + Real(m.acceptance_rate) + "}";
}

LinkStreams::LinkStreams(const Topology& topology, std::uint64_t seed) {
  for (std::size_t i = 0; i < topology.links.size(); ++i)
    streams_.push_back(Rng::Derive(seed, {topology.links[i].seed, i}));
}

Network::Network(const Topology& topology, std::uint64_t seed, EventLoop& loop,
                 MetricsRecord& metrics)
    : topology_(topology), streams_(topology, seed), loop_(loop), metrics_(metrics) {}

double Network::Compute(const Node& node, double start, double seconds, std::string_view label,
                        EventLoop::Handler on_done) {
  Require(seconds >= 0.0, ErrorCode::kInternal, "negative compute time");
  const double end = start + seconds;
  if (node.tier == Role::kDevice) {
    metrics_.device_compute_s += seconds;
  } else {
    metrics_.server_compute_s += seconds;
  }
  loop_.Schedule(end, EventKind::kComputeDone, node.id, node.id, 0, std::string(label),
                 std::move(on_done));
  return end;
}

double Network::Send(const Node& from, const Node& to, double send_time, std::size_t bytes,
                     std::string_view label, EventLoop::Handler on_arrival) {
  const auto link = topology_.FindLink(from.id, to.id);
  Require(link.has_value(), ErrorCode::kInvalidScenario,
          "no link between '" + from.id + "' and '" + to.id + "'");
  const double duration = TransmitTime(bytes, topology_.links[*link], streams_.For(*link));
  metrics_.transmit_s += duration;
  if (static_cast<int>(to.tier) > static_cast<int>(from.tier)) {
    metrics_.bytes_up += bytes;
  } else {
    metrics_.bytes_down += bytes;
  }
  const double arrival = send_time + duration;
  loop_.Schedule(arrival, EventKind::kMessageDelivered, from.id, to.id, bytes, std::string(label),
                 std::move(on_arrival));
  return arrival;
}

NetworkClock::NetworkClock(Network& network) : network_(network) {}

const Node& NetworkClock::NodeFor(Role role) const {
  const Node* n = network_.topology().NodeForTier(role);
  Require(n != nullptr, ErrorCode::kInvalidScenario,
          "topology has no " + std::string(specdec::RoleName(role)) + " node");
  return *n;
}

double NetworkClock::Compute(Role role, double start, double seconds, std::string_view label) {
  return network_.Compute(NodeFor(role), start, seconds, label);
}

double NetworkClock::Transmit(Role from, Role to, double send_time, std::size_t bytes,
                              std::string_view label) {
  return network_.Send(NodeFor(from), NodeFor(to), send_time, bytes, label);
}

}  // namespace aiflow::netsim
