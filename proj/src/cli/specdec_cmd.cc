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

#include <spdlog/spdlog.h>

#include "aiflow/cli/commands.h"
#include "aiflow/netsim/scenario.h"
#include "config.h"

namespace aiflow::cli {
namespace {

using specdec::Role;

std::string TierList(const std::vector<Role>& tiers) {
  std::string out;
  for (Role r : tiers) {
    if (!out.empty()) out += "-";
    out += specdec::RoleName(r);
  }
  return out;
}

std::vector<Role> ParseTiers(const ConfigNode& node) {
  std::vector<Role> tiers;
  for (std::size_t i = 0; i < node.Size(); ++i) {
    const ConfigNode t = node.Index(i);
    try {
      tiers.push_back(specdec::ParseRole(t.String()));
    } catch (const Error&) {
      Fail(ErrorCode::kConfigError, "field '" + t.path() + "': unknown tier '" + t.String() + "'");
    }
  }
  return tiers;
}

}  // namespace

double UnigramTv(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                 std::size_t vocab_size) {
  Require(!a.empty() && !b.empty(), ErrorCode::kInvalidInput, "TV needs non-empty streams");
  std::vector<std::size_t> ca(vocab_size, 0), cb(vocab_size, 0);
  for (std::uint32_t t : a) ++ca.at(t);
  for (std::uint32_t t : b) ++cb.at(t);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double s = 0.0;
  for (std::size_t x = 0; x < vocab_size; ++x) s += std::abs(ca[x] / na - cb[x] / nb);
  return 0.5 * s;
}

std::filesystem::path RunSpecdec(const CommandOptions& options) {
  const nlohmann::json doc = ReadConfigJson(options.config);
  netsim::Scenario scenario = netsim::ParseScenario(doc.dump());
  Require(std::holds_alternative<netsim::SpecdecScenario>(scenario.params), ErrorCode::kConfigError,
          "field 'scenario.kind': the specdec command needs kind 'specdec'");
  const std::uint64_t seed = ResolveSeed(doc, options.seed);
  const auto& base = std::get<netsim::SpecdecScenario>(scenario.params);

  std::vector<std::vector<Role>> tier_sets = {base.tiers};
  std::vector<specdec::Mode> modes = {base.mode};
  std::vector<std::size_t> gammas = {base.draft_len};
  const ConfigNode cfg(&doc, "");
  if (cfg.Has("sweep")) {
    const ConfigNode sweep = cfg.At("sweep");
    if (sweep.Has("tiers")) {
      tier_sets.clear();
      for (std::size_t i = 0; i < sweep.At("tiers").Size(); ++i)
        tier_sets.push_back(ParseTiers(sweep.At("tiers").Index(i)));
    }
    if (sweep.Has("mode")) {
      modes.clear();
      for (std::size_t i = 0; i < sweep.At("mode").Size(); ++i) {
        const ConfigNode m = sweep.At("mode").Index(i);
        try {
          modes.push_back(specdec::ParseMode(m.String()));
        } catch (const Error&) {
          Fail(ErrorCode::kConfigError, "field '" + m.path() + "': unknown mode '" + m.String() + "'");
        }
      }
    }
    if (sweep.Has("draft_len")) {
      gammas.clear();
      for (std::size_t i = 0; i < sweep.At("draft_len").Size(); ++i)
        gammas.push_back(sweep.At("draft_len").Index(i).U64());
    }
  }

  Table table;
  table.columns = {"mode", "tiers", "gamma", "acceptance_rate", "sim_tokens_per_s",
                   "tv_distance_to_target"};
  nlohmann::ordered_json summary;
  summary["command"] = "specdec";
  summary["seed"] = seed;
  summary["num_tokens"] = base.num_tokens;
  summary["configurations"] = nlohmann::ordered_json::array();

  for (const auto& tiers : tier_sets) {
    Require(!tiers.empty(), ErrorCode::kConfigError, "field 'sweep.tiers': empty tier list");
    const bool single = tiers.size() == 1;
    for (specdec::Mode mode : modes) {
      if (single && mode != modes.front()) continue;  // modes do not apply
      if (!single && tiers.size() > 2 && mode == specdec::Mode::kPipelined) {
        spdlog::info("skipping pipelined mode for {} (two tiers only)", TierList(tiers));
        continue;
      }
      for (std::size_t gamma : gammas) {
        if (single && gamma != gammas.front()) continue;
        netsim::SpecdecScenario s = base;
        s.tiers = tiers;
        s.mode = mode;
        s.draft_len = gamma;
        const netsim::ScenarioResult r = netsim::RunSpecdecScenario(scenario.topology, s, seed);

        // Target-only decoding with the same streams; identical models give TV 0.
        const netsim::TierModels tm = netsim::BuildTierModels(s);
        Rng ref_rng = netsim::DecodeStream(seed);
        const specdec::DecodeTranscript ref = specdec::RunStandalone(
            tiers.back(), *tm.models.back(), s.prompt, s.num_tokens, ref_rng, single ? 1 : gamma);
        const double tv = UnigramTv(r.transcript->tokens, ref.tokens, s.lm.vocab_size);
        const double tps = static_cast<double>(r.metrics.tokens_emitted) / r.metrics.simulated_wall_s;
        const std::string mode_name = single ? "standalone" : std::string(specdec::ModeName(mode));
        spdlog::info("{} {} gamma={} acceptance={:.4f} tokens/s={:.3f} tv={:.5f}", mode_name,
                     TierList(tiers), single ? 0 : gamma, r.metrics.acceptance_rate, tps, tv);
        table.AddRow({mode_name, TierList(tiers), static_cast<std::int64_t>(single ? 0 : gamma),
                      r.metrics.acceptance_rate, tps, tv});
        nlohmann::ordered_json row;
        row["mode"] = mode_name;
        row["tiers"] = TierList(tiers);
        row["gamma"] = single ? 0 : gamma;
        row["acceptance_rate"] = r.metrics.acceptance_rate;
        row["sim_tokens_per_s"] = tps;
        row["tv_distance_to_target"] = tv;
        row["simulated_wall_s"] = r.metrics.simulated_wall_s;
        row["bytes_up"] = r.metrics.bytes_up;
        row["bytes_down"] = r.metrics.bytes_down;
        summary["configurations"].push_back(std::move(row));
      }
    }
  }

  RunOutput out("specdec", options, seed);
  out.WriteTable("specdec", table);
  out.WriteText("summary.json", summary.dump(2) + "\n");
  out.Finish();
  return out.dir();
}

}  // namespace aiflow::cli
