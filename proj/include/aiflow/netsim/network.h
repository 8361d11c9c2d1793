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

#ifndef AIFLOW_NETSIM_NETWORK_H_
#define AIFLOW_NETSIM_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "aiflow/numerics/rng.h"
#include "aiflow/specdec/decoder.h"

namespace aiflow::netsim {

using specdec::Role;

struct Node {
  std::string id;
  Role tier = Role::kDevice;
  std::map<std::string, double> compute_cost;  // op kind -> simulated seconds
};

// Links are symmetric: one entry serves both directions.
struct Link {
  std::string from;
  std::string to;
  double latency_s = 0.0;
  double bandwidth_bytes_per_s = 0.0;
  double jitter_s = 0.0;  // half-width of the uniform jitter
  std::uint64_t seed = 0;
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Link> links;

  const Node* FindNode(std::string_view id) const;
  // First node of the tier in declaration order.
  const Node* NodeForTier(Role tier) const;
  std::optional<std::size_t> FindLink(std::string_view a, std::string_view b) const;
};

// Throws invalid-scenario on dangling endpoints, duplicate ids or bad link
// parameters.
void ValidateTopology(const Topology& topology);

// latency + U(-jitter, +jitter) + bytes / bandwidth, clamped at 0. Draws one
// uniform only when jitter > 0.
double TransmitTime(std::size_t bytes, const Link& link, Rng& rng);

enum class EventKind { kComputeDone, kMessageDelivered, kScenarioStep };
std::string_view EventKindName(EventKind kind);

struct TraceEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kScenarioStep;
  std::string src;
  std::string dst;
  std::size_t bytes = 0;
  std::string label;
};

// Single-threaded discrete-event loop. Events run in (time, seq) order where
// seq is the scheduling order; a handler may schedule further events no
// earlier than the current time. Every processed event lands in the trace.
class EventLoop {
 public:
  using Handler = std::function<void()>;

  std::uint64_t Schedule(double time, EventKind kind, std::string src, std::string dst,
                         std::size_t bytes, std::string label, Handler handler = {});
  void Run();
  double now() const { return now_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  struct Pending {
    TraceEvent event;
    Handler handler;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      if (a.event.time != b.event.time) return a.event.time > b.event.time;
      return a.event.seq > b.event.seq;
    }
  };
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::vector<TraceEvent> trace_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
};

// One JSON object per line: {"t","seq","kind","src","dst","bytes","label"},
// reals printed with 17 significant digits.
std::string TraceToJsonl(const std::vector<TraceEvent>& trace);

struct MetricsRecord {
  std::size_t tokens_emitted = 0;
  double simulated_wall_s = 0.0;
  double device_compute_s = 0.0;
  double transmit_s = 0.0;
  double server_compute_s = 0.0;
  std::size_t bytes_up = 0;    // toward the higher tier
  std::size_t bytes_down = 0;
  double acceptance_rate = 0.0;
};

std::string MetricsToJson(const MetricsRecord& m);

// Per-link jitter streams keyed by (run seed, link seed, link index).
class LinkStreams {
 public:
  LinkStreams(const Topology& topology, std::uint64_t seed);
  Rng& For(std::size_t link_index) { return streams_.at(link_index); }

 private:
  std::vector<Rng> streams_;
};

// Network model shared by the scenario runners: every compute or transfer
// becomes an event and is accounted in the metrics.
class Network {
 public:
  Network(const Topology& topology, std::uint64_t seed, EventLoop& loop, MetricsRecord& metrics);

  // Returns the completion time; posts a compute-done event.
  double Compute(const Node& node, double start, double seconds, std::string_view label,
                 EventLoop::Handler on_done = {});
  // Returns the arrival time; posts a message-delivered event.
  double Send(const Node& from, const Node& to, double send_time, std::size_t bytes,
              std::string_view label, EventLoop::Handler on_arrival = {});

  const Topology& topology() const { return topology_; }
  EventLoop& loop() { return loop_; }

 private:
  const Topology& topology_;
  LinkStreams streams_;
  EventLoop& loop_;
  MetricsRecord& metrics_;
};

// ProtocolClock over the network: each protocol role maps to the first node
// of that tier.
class NetworkClock : public specdec::ProtocolClock {
 public:
  explicit NetworkClock(Network& network);
  double Compute(Role role, double start, double seconds, std::string_view label) override;
  double Transmit(Role from, Role to, double send_time, std::size_t bytes,
                  std::string_view label) override;

 private:
  const Node& NodeFor(Role role) const;
  Network& network_;
};

}  // namespace aiflow::netsim

#endif  // AIFLOW_NETSIM_NETWORK_H_
