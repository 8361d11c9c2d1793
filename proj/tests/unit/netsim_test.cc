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

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "aiflow/error.h"
#include "aiflow/netsim/network.h"
#include "aiflow/netsim/scenario.h"

namespace aiflow::netsim {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

Topology TwoTier(double latency = 0.010, double bandwidth = 1e6, double jitter = 0.0) {
  Topology t;
  t.nodes = {{"phone", Role::kDevice, {}}, {"edge", Role::kEdge, {}}, {"cloud", Role::kCloud, {}}};
  t.links = {{"phone", "edge", latency, bandwidth, jitter, 1},
             {"edge", "cloud", latency, bandwidth, jitter, 2}};
  return t;
}

// Device and edge run the same full model, so every draft is accepted.
SpecdecScenario IdenticalModels(specdec::Mode mode) {
  SpecdecScenario s;
  s.mode = mode;
  s.num_tokens = 64;
  s.models[Role::kDevice] = {8, 0.0};
  s.models[Role::kEdge] = {8, 0.0};
  return s;
}

// ---- links and the event loop

TEST(TransmitTimeTest, Examples) {
  Rng rng(1);
  EXPECT_EQ(TransmitTime(0, Link{"a", "b", 0.010, 1e6, 0.0, 0}, rng), 0.010);
  EXPECT_NEAR(TransmitTime(1000, Link{"a", "b", 0.010, 1e6, 0.0, 0}, rng), 0.011, 1e-15);
  for (int i = 0; i < 1000; ++i) {
    const double t = TransmitTime(0, Link{"a", "b", 0.010, 1e6, 0.002, 0}, rng);
    EXPECT_GE(t, 0.008);
    EXPECT_LE(t, 0.012);
  }
}

TEST(TransmitTimeTest, NeverNegative) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i)
    EXPECT_GE(TransmitTime(0, Link{"a", "b", 0.001, 1e6, 0.5, 0}, rng), 0.0);
}

TEST(EventLoopTest, RunsInTimeThenSequenceOrder) {
  EventLoop loop;
  std::vector<std::string> order;
  loop.Schedule(2.0, EventKind::kScenarioStep, "x", "x", 0, "late", [&] { order.push_back("late"); });
  loop.Schedule(1.0, EventKind::kScenarioStep, "x", "x", 0, "a", [&] {
    order.push_back("a");
    loop.Schedule(1.0, EventKind::kScenarioStep, "x", "x", 0, "c", [&] { order.push_back("c"); });
  });
  loop.Schedule(1.0, EventKind::kScenarioStep, "x", "x", 0, "b", [&] { order.push_back("b"); });
  loop.Run();
  EXPECT_EQ(order, (std::vector<std::string>{"a", "b", "c", "late"}));
  EXPECT_EQ(loop.now(), 2.0);
}

TEST(EventLoopTest, RejectsEventsInThePast) {
  EventLoop loop;
  loop.Schedule(1.0, EventKind::kScenarioStep, "x", "x", 0, "a", [&] {
    EXPECT_EQ(CodeOf([&] { loop.Schedule(0.5, EventKind::kScenarioStep, "x", "x", 0, "b"); }),
              ErrorCode::kInternal);
  });
  loop.Run();
}

TEST(TraceTest, JsonLinesFormat) {
  EventLoop loop;
  loop.Schedule(0.1, EventKind::kMessageDelivered, "phone", "edge", 32, "draft");
  loop.Run();
  EXPECT_EQ(TraceToJsonl(loop.trace()),
            "{\"t\":0.10000000000000001,\"seq\":0,\"kind\":\"message-delivered\",\"src\":\"phone\","
            "\"dst\":\"edge\",\"bytes\":32,\"label\":\"draft\"}\n");
}

TEST(TopologyTest, DanglingReferencesAreInvalidScenario) {
  Topology t = TwoTier();
  t.links.push_back({"phone", "mars", 0.01, 1e6, 0.0, 0});
  EXPECT_EQ(CodeOf([&] { ValidateTopology(t); }), ErrorCode::kInvalidScenario);
  t = TwoTier();
  t.links[0].bandwidth_bytes_per_s = 0.0;
  EXPECT_EQ(CodeOf([&] { ValidateTopology(t); }), ErrorCode::kInvalidScenario);
  t = TwoTier();
  t.nodes.push_back(t.nodes[0]);
  EXPECT_EQ(CodeOf([&] { ValidateTopology(t); }), ErrorCode::kInvalidScenario);
}

// ---- scenarios

TEST(ScenarioTest, EmptyScenario) {
  Scenario s;
  s.topology = TwoTier();
  const ScenarioResult r = RunScenario(s);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(MetricsToJson(r.metrics), MetricsToJson(MetricsRecord{}));
}

TEST(SpecdecScenarioTest, FullAcceptanceMatchesHandComputedWallTime) {
  const ScenarioResult r =
      RunSpecdecScenario(TwoTier(), IdenticalModels(specdec::Mode::kSequential), 7);
  EXPECT_EQ(r.metrics.acceptance_rate, 1.0);
  // Per round: 4 drafts, 32-byte draft message, one verify pass, 20-byte result.
  const double round = 4 * 0.010 + (0.010 + 32e-6) + 0.030 + (0.010 + 20e-6);
  EXPECT_NEAR(r.metrics.simulated_wall_s, 16 * round, 1e-12);
  EXPECT_EQ(r.metrics.tokens_emitted, 64u);
  EXPECT_EQ(r.metrics.bytes_up, 16u * 32);
  EXPECT_EQ(r.metrics.bytes_down, 16u * 20);
  EXPECT_NEAR(r.metrics.device_compute_s + r.metrics.transmit_s + r.metrics.server_compute_s,
              r.metrics.simulated_wall_s, 1e-12);
  EXPECT_NEAR(r.trace.back().time, r.metrics.simulated_wall_s, 0.0);
}

TEST(SpecdecScenarioTest, EdgeOnlyBaselineSendsNothing) {
  SpecdecScenario s;
  s.tiers = {Role::kEdge};
  const ScenarioResult r = RunSpecdecScenario(TwoTier(), s, 1);
  EXPECT_EQ(r.metrics.bytes_up, 0u);
  EXPECT_EQ(r.metrics.bytes_down, 0u);
  EXPECT_NEAR(r.metrics.simulated_wall_s, 64 * 0.030, 1e-12);
}

TEST(SpecdecScenarioTest, SequentialComponentsSumToWallTime) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    SpecdecScenario s;
    s.lm.seed = seed;
    const ScenarioResult r = RunSpecdecScenario(TwoTier(0.01, 1e6, 0.003), s, seed);
    EXPECT_NEAR(r.metrics.device_compute_s + r.metrics.transmit_s + r.metrics.server_compute_s,
                r.metrics.simulated_wall_s, 1e-9);
    s.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
    const ScenarioResult three = RunSpecdecScenario(TwoTier(0.01, 1e6, 0.003), s, seed);
    EXPECT_NEAR(
        three.metrics.device_compute_s + three.metrics.transmit_s + three.metrics.server_compute_s,
        three.metrics.simulated_wall_s, 1e-9);
  }
}

TEST(SpecdecScenarioTest, PipelinedNoSlowerThanSequential) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    SpecdecScenario s;
    s.lm.seed = seed;
    s.num_tokens = 200;
    const ScenarioResult seq = RunSpecdecScenario(TwoTier(), s, seed);
    s.mode = specdec::Mode::kPipelined;
    const ScenarioResult pipe = RunSpecdecScenario(TwoTier(), s, seed);
    EXPECT_EQ(seq.transcript->tokens, pipe.transcript->tokens);
    EXPECT_LE(pipe.metrics.simulated_wall_s, seq.metrics.simulated_wall_s);
    EXPECT_LE(pipe.metrics.simulated_wall_s, pipe.metrics.device_compute_s +
                                                 pipe.metrics.transmit_s +
                                                 pipe.metrics.server_compute_s + 1e-12);
  }
}

TEST(SpecdecScenarioTest, DeviceEdgeBeatsEdgeOnlyAtHighAcceptance) {
  for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
    SpecdecScenario s;
    s.lm.seed = seed;
    s.num_tokens = 400;
    const ScenarioResult collab = RunSpecdecScenario(TwoTier(), s, seed);
    s.tiers = {Role::kEdge};
    const ScenarioResult edge = RunSpecdecScenario(TwoTier(), s, seed);
    ASSERT_GE(collab.metrics.acceptance_rate, 0.8) << "seed " << seed;
    EXPECT_GE(edge.metrics.simulated_wall_s / collab.metrics.simulated_wall_s, 1.2) << "seed " << seed;
  }
}

TEST(SpecdecScenarioTest, ThreeTierBeatsCloudOnly) {
  for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
    SpecdecScenario s;
    s.lm.seed = seed;
    s.num_tokens = 400;
    s.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
    const ScenarioResult three = RunSpecdecScenario(TwoTier(), s, seed);
    const double edge_cloud = three.transcript->AcceptanceRate(1);
    s.tiers = {Role::kCloud};
    const ScenarioResult cloud = RunSpecdecScenario(TwoTier(), s, seed);
    ASSERT_GE(three.metrics.acceptance_rate, 0.6) << "seed " << seed;
    ASSERT_GE(edge_cloud, 0.6) << "seed " << seed;
    EXPECT_LT(three.metrics.simulated_wall_s, cloud.metrics.simulated_wall_s) << "seed " << seed;
  }
}

TEST(SpecdecScenarioTest, DeterministicTraceWithJitter) {
  SpecdecScenario s;
  s.mode = specdec::Mode::kPipelined;
  const Topology t = TwoTier(0.01, 1e6, 0.004);
  const ScenarioResult a = RunSpecdecScenario(t, s, 99);
  const ScenarioResult b = RunSpecdecScenario(t, s, 99);
  EXPECT_EQ(TraceToJsonl(a.trace), TraceToJsonl(b.trace));
  EXPECT_EQ(MetricsToJson(a.metrics), MetricsToJson(b.metrics));
  const ScenarioResult c = RunSpecdecScenario(t, s, 100);
  EXPECT_NE(TraceToJsonl(a.trace), TraceToJsonl(c.trace));
}

TEST(SpecdecScenarioTest, TraceIsOrderedAndConservesMessages) {
  SpecdecScenario s;
  s.mode = specdec::Mode::kPipelined;
  const ScenarioResult r = RunSpecdecScenario(TwoTier(0.01, 1e6, 0.004), s, 5);
  std::set<std::uint64_t> seqs;
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_TRUE(seqs.insert(r.trace[i].seq).second);
    if (i > 0) {
      EXPECT_GE(r.trace[i].time, r.trace[i - 1].time);
    }
    if (r.trace[i].kind == EventKind::kMessageDelivered) bytes += r.trace[i].bytes;
  }
  EXPECT_EQ(bytes, r.metrics.bytes_up + r.metrics.bytes_down);
}

TEST(SpecdecScenarioTest, MissingTierNode) {
  Topology t = TwoTier();
  t.nodes.pop_back();
  t.links.pop_back();
  SpecdecScenario s;
  s.tiers = {Role::kDevice, Role::kEdge, Role::kCloud};
  EXPECT_EQ(CodeOf([&] { RunSpecdecScenario(t, s, 1); }), ErrorCode::kInvalidScenario);
}

TofcScenario SmallTofc(std::size_t m) {
  TofcScenario s;
  s.features = FeatureSource{.path = {}, .rows = 64, .dims = 8, .seed = 3};
  s.calibration = FeatureSource{.path = {}, .rows = 256, .dims = 8, .seed = 4};
  s.tofc.num_centers = m;
  return s;
}

TEST(TofcScenarioTest, FewerCentersTransmitFaster) {
  const Topology slow = TwoTier(0.01, 1e5);
  const ScenarioResult full = RunTofcScenario(slow, SmallTofc(64), 1);
  const ScenarioResult quarter = RunTofcScenario(slow, SmallTofc(16), 1);
  EXPECT_LT(quarter.metrics.transmit_s, full.metrics.transmit_s);
  EXPECT_LT(quarter.tofc_stats->bytes, full.tofc_stats->bytes);
  EXPECT_NEAR(full.metrics.device_compute_s + full.metrics.transmit_s + full.metrics.server_compute_s,
              full.metrics.simulated_wall_s, 1e-12);
  EXPECT_EQ(full.metrics.bytes_up, full.tofc_stats->bytes + specdec::kFrameBytes);
}

TEST(TofcScenarioTest, HugeBandwidthLeavesLatencyOnly) {
  const ScenarioResult r = RunTofcScenario(TwoTier(0.01, 1e12), SmallTofc(16), 1);
  EXPECT_NEAR(r.metrics.transmit_s, 0.01, 1e-8);
}

TEST(TofcScenarioTest, TransmitShrinksAsBandwidthGrows) {
  double previous = 1e300;
  for (double bw : {1e4, 1e5, 1e6, 1e7}) {
    const ScenarioResult r = RunTofcScenario(TwoTier(0.01, bw), SmallTofc(16), 1);
    EXPECT_LT(r.metrics.transmit_s, previous);
    previous = r.metrics.transmit_s;
  }
}

TEST(TofcScenarioTest, ZeroFeaturesRejected) {
  TofcScenario s = SmallTofc(4);
  s.features.rows = 0;
  EXPECT_EQ(CodeOf([&] { RunTofcScenario(TwoTier(), s, 1); }), ErrorCode::kInvalidInput);
}

Topology Star(const std::vector<double>& latencies) {
  Topology t;
  t.nodes.push_back({"edge", Role::kEdge, {}});
  for (std::size_t i = 0; i < latencies.size(); ++i) {
    const std::string id = "dev" + std::to_string(i);
    t.nodes.push_back({id, Role::kDevice, {}});
    t.links.push_back({id, "edge", latencies[i], 1e6, 0.0, i});
  }
  return t;
}

double AggregateStart(const ScenarioResult& r) {
  for (const TraceEvent& e : r.trace)
    if (e.label == "aggregate-start") return e.time;
  return -1.0;
}

double LastResponse(const ScenarioResult& r) {
  double t = -1.0;
  for (const TraceEvent& e : r.trace)
    if (e.label == "response") t = std::max(t, e.time);
  return t;
}

TEST(CollabTest, SingleDeviceExchangesFourMessages) {
  const ScenarioResult r = RunDeviceServerCollab(Star({0.01}), CollabScenario{}, 1);
  std::vector<std::string> labels;
  for (const TraceEvent& e : r.trace)
    if (e.kind == EventKind::kMessageDelivered) labels.push_back(e.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"request", "response", "aggregate-ack", "revision"}));
}

TEST(CollabTest, AggregationWaitsForEveryResponse) {
  const ScenarioResult same = RunDeviceServerCollab(Star({0.01, 0.01, 0.01, 0.01, 0.01}),
                                                    CollabScenario{.num_devices = 5}, 1);
  EXPECT_EQ(AggregateStart(same), LastResponse(same));
  const ScenarioResult mixed = RunDeviceServerCollab(Star({0.01, 0.2, 0.05}),
                                                     CollabScenario{.num_devices = 3}, 1);
  EXPECT_EQ(AggregateStart(mixed), LastResponse(mixed));
  // The slow device's round trip bounds the aggregation start.
  EXPECT_GE(AggregateStart(mixed), 2 * 0.2 + 0.25);
  bool seen_aggregate = false;
  for (const TraceEvent& e : mixed.trace) {
    if (e.label == "aggregate-start") seen_aggregate = true;
    if (e.label == "response") {
      EXPECT_FALSE(seen_aggregate);
    }
  }
}

TEST(CollabTest, TooFewDevices) {
  EXPECT_EQ(CodeOf([] { RunDeviceServerCollab(Star({0.01}), CollabScenario{.num_devices = 2}, 1); }),
            ErrorCode::kInvalidScenario);
}

// ---- scenario documents

constexpr const char* kDoc = R"({
  "version": 1,
  "seed": 11,
  "topology": {
    "nodes": [{"id": "phone", "tier": "device", "compute_cost": {"token": 0.01}},
              {"id": "edge", "tier": "edge"}],
    "links": [{"from": "phone", "to": "edge", "latency_s": 0.01,
               "bandwidth_bytes_per_s": 1e6, "jitter_s": 0.001, "seed": 3}]
  },
  "scenario": {"kind": "specdec", "tiers": ["device", "edge"], "draft_len": 3,
               "mode": "pipelined", "num_tokens": 20,
               "models": {"device": {"exit": 7, "branch_ratio": 0.75}}}
})";

TEST(ScenarioDocTest, Parses) {
  const Scenario s = ParseScenario(kDoc);
  EXPECT_EQ(s.seed, 11u);
  EXPECT_EQ(ScenarioKind(s), "specdec");
  const auto& p = std::get<SpecdecScenario>(s.params);
  EXPECT_EQ(p.draft_len, 3u);
  EXPECT_EQ(p.mode, specdec::Mode::kPipelined);
  EXPECT_EQ(p.models.at(Role::kDevice).exit, 7u);
  EXPECT_EQ(s.topology.links[0].jitter_s, 0.001);
  const ScenarioResult r = RunScenario(s);
  EXPECT_EQ(r.metrics.tokens_emitted, 20u);
}

TEST(ScenarioDocTest, ErrorsNameTheField) {
  try {
    ParseScenario(R"({"topology": {"nodes": [{"tier": "edge"}]}, "scenario": {"kind": "none"}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(std::string(e.what()).find("topology.nodes[0].id"), std::string::npos) << e.what();
  }
  EXPECT_EQ(CodeOf([] { ParseScenario("{"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] {
              ParseScenario(R"({"topology": {"nodes": []}, "scenario": {"kind": "warp"}})");
            }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] {
              ParseScenario(
                  R"({"topology": {"nodes": [], "links": [{"from": "a", "to": "b", "latency_s": 1,
                      "bandwidth_bytes_per_s": 1}]}, "scenario": {"kind": "none"}})");
            }),
            ErrorCode::kInvalidScenario);
}

TEST(ScenarioDocTest, IdenticalRunsGiveIdenticalTraces) {
  const Scenario s = ParseScenario(kDoc);
  EXPECT_EQ(TraceToJsonl(RunScenario(s).trace), TraceToJsonl(RunScenario(s).trace));
}

}  // namespace
}  // namespace aiflow::netsim
