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

#include <spdlog/spdlog.h>

#include "aiflow/cli/commands.h"
#include "aiflow/netsim/scenario.h"
#include "config.h"

namespace aiflow::cli {

std::filesystem::path RunSimulate(const CommandOptions& options) {
  const nlohmann::json doc = ReadConfigJson(options.config);
  netsim::Scenario scenario = netsim::ParseScenario(doc.dump());
  scenario.seed = ResolveSeed(doc, options.seed);
  const std::string kind(netsim::ScenarioKind(scenario));
  spdlog::info("simulating {} scenario with seed {}", kind, scenario.seed);
  const netsim::ScenarioResult r = netsim::RunScenario(scenario);

  const netsim::MetricsRecord& m = r.metrics;
  Table table;
  table.columns = {"kind",         "tokens_emitted", "simulated_wall_s", "device_compute_s",
                   "transmit_s",   "server_compute_s", "bytes_up",       "bytes_down",
                   "acceptance_rate"};
  table.AddRow({kind, static_cast<std::int64_t>(m.tokens_emitted), m.simulated_wall_s,
                m.device_compute_s, m.transmit_s, m.server_compute_s,
                static_cast<std::int64_t>(m.bytes_up), static_cast<std::int64_t>(m.bytes_down),
                m.acceptance_rate});

  RunOutput out("simulate", options, scenario.seed);
  out.WriteText("trace.jsonl", netsim::TraceToJsonl(r.trace));
  out.WriteTable("metrics", table);
  if (r.transcript) out.WriteText("transcript.json", specdec::TranscriptToJson(*r.transcript));
  out.Finish();
  return out.dir();
}

}  // namespace aiflow::cli
