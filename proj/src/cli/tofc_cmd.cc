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

#include <spdlog/spdlog.h>

#include "aiflow/cli/commands.h"
#include "aiflow/netsim/scenario.h"
#include "config.h"

namespace aiflow::cli {

std::filesystem::path RunTofc(const CommandOptions& options) {
  const nlohmann::json doc = ReadConfigJson(options.config);
  const netsim::Scenario scenario = netsim::ParseScenario(doc.dump());
  Require(std::holds_alternative<netsim::TofcScenario>(scenario.params), ErrorCode::kConfigError,
          "field 'scenario.kind': the tofc command needs kind 'tofc'");
  const std::uint64_t seed = ResolveSeed(doc, options.seed);
  const auto& base = std::get<netsim::TofcScenario>(scenario.params);
  const std::size_t n = netsim::LoadFeatureSource(base.features).rows();

  // Default sweep: N, N/2, N/4, N/8.
  std::vector<std::size_t> centers;
  for (std::size_t div : {1, 2, 4, 8})
    if (n / div >= 1 && std::find(centers.begin(), centers.end(), n / div) == centers.end())
      centers.push_back(n / div);
  std::vector<std::optional<double>> bandwidths = {std::nullopt};
  const ConfigNode cfg(&doc, "");
  if (cfg.Has("sweep")) {
    const ConfigNode sweep = cfg.At("sweep");
    if (sweep.Has("num_centers")) {
      centers.clear();
      for (std::size_t i = 0; i < sweep.At("num_centers").Size(); ++i)
        centers.push_back(sweep.At("num_centers").Index(i).U64());
    }
    if (sweep.Has("bandwidth_bytes_per_s")) {
      bandwidths.clear();
      for (std::size_t i = 0; i < sweep.At("bandwidth_bytes_per_s").Size(); ++i)
        bandwidths.push_back(sweep.At("bandwidth_bytes_per_s").Index(i).Real());
    }
  }

  Table table;
  table.columns = {"M",       "est_bits",   "payload_bytes", "balance", "device_s",
                   "transmit_s", "server_s", "wall_s",        "bandwidth_bytes_per_s"};
  for (const auto& bw : bandwidths) {
    netsim::Topology topology = scenario.topology;
    if (bw)
      for (auto& link : topology.links) link.bandwidth_bytes_per_s = *bw;
    const netsim::Node* device = topology.NodeForTier(specdec::Role::kDevice);
    const netsim::Node* server = topology.NodeForTier(base.server);
    Require(device != nullptr && server != nullptr, ErrorCode::kInvalidScenario,
            "tofc needs a device node and a server node");
    const auto link = topology.FindLink(device->id, server->id);
    Require(link.has_value(), ErrorCode::kInvalidScenario,
            "no link between '" + device->id + "' and '" + server->id + "'");
    const double uplink = topology.links[*link].bandwidth_bytes_per_s;
    for (std::size_t m : centers) {
      netsim::TofcScenario s = base;
      s.tofc.num_centers = m;
      const netsim::ScenarioResult r = netsim::RunTofcScenario(topology, s, seed);
      spdlog::info("M={} bandwidth={} payload={} bytes wall={:.6f}s", m, uplink,
                   r.tofc_stats->payload_bytes, r.metrics.simulated_wall_s);
      table.AddRow({static_cast<std::int64_t>(m), r.tofc_stats->est_bits,
                    static_cast<std::int64_t>(r.tofc_stats->payload_bytes), r.tofc_stats->balance,
                    r.metrics.device_compute_s, r.metrics.transmit_s, r.metrics.server_compute_s,
                    r.metrics.simulated_wall_s, uplink});
    }
  }

  RunOutput out("tofc", options, seed);
  out.WriteTable("tofc", table);
  out.Finish();
  return out.dir();
}

}  // namespace aiflow::cli
