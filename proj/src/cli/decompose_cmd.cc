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
#include "aiflow/familial/decompose.h"
#include "aiflow/familial/rank_allocation.h"
#include "aiflow/numerics/linalg.h"
#include "aiflow/numerics/rng.h"
#include "config.h"

namespace aiflow::cli {
namespace {

Matrix Gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_data()) v = rng.Normal();
  return m;
}

double Measured(const StudyLayer& c, std::size_t h) {
  if (h == 0) return c.energy;
  return familial::MeasuredLoss(c.w, familial::FactorsFromSvd(c.svd, c.ctx, h), c.x);
}

void CheckAgreement(std::size_t layer, std::size_t h, double predicted, double measured,
                    double energy) {
  // Relative 1e-8; the absolute floor only matters where predicted is 0.
  if (std::abs(measured - predicted) > 1e-8 * predicted + 1e-13 * energy)
    Fail(ErrorCode::kInternal, "layer " + std::to_string(layer) + " h=" + std::to_string(h) +
                                   ": measured loss " + FormatReal(measured) +
                                   " disagrees with predicted " + FormatReal(predicted));
}

}  // namespace

StudyLayer MakeStudyLayer(std::uint64_t seed, std::size_t index, std::size_t rows, std::size_t cols,
                          std::size_t samples, double ridge) {
  Rng rng = Rng::Derive(seed, {index});
  StudyLayer c;
  c.w = Gaussian(rng, rows, cols);
  const Matrix mix = Gaussian(rng, cols, cols);
  c.x = mix * Gaussian(rng, cols, samples);
  c.ctx = familial::Whiten(c.x, ridge);
  c.svd = familial::WhitenedSvd(c.w, c.ctx);
  c.energy = (c.w * c.x).SquaredFrobeniusNorm();
  return c;
}

std::filesystem::path RunDecompose(const CommandOptions& options) {
  const nlohmann::json doc = ReadConfigJson(options.config);
  const ConfigNode cfg(&doc, "");
  const std::uint64_t seed = ResolveSeed(doc, options.seed);
  const std::string mode = cfg.StringOr("mode", "sweep");
  if (mode != "sweep" && mode != "budget")
    Fail(ErrorCode::kConfigError, "field 'mode': expected 'sweep' or 'budget'");
  const double ridge = cfg.RealOr("ridge", 0.0);

  const ConfigNode layers = cfg.At("layers");
  std::vector<StudyLayer> cases;
  std::vector<familial::LayerShape> shapes;
  for (std::size_t i = 0; i < layers.Size(); ++i) {
    const ConfigNode l = layers.Index(i);
    const std::size_t m = l.At("rows").U64();
    const std::size_t n = l.At("cols").U64();
    if (m < 1 || n < 1) Fail(ErrorCode::kConfigError, "field '" + l.path() + "': empty layer");
    const std::size_t samples = l.U64Or("samples", cfg.U64Or("calib_samples", 4 * n));
    spdlog::debug("layer {}: {}x{} with {} calibration samples", i, m, n, samples);
    cases.push_back(MakeStudyLayer(seed, i, m, n, samples, ridge));
    shapes.push_back({m, n});
  }
  if (cases.empty()) Fail(ErrorCode::kConfigError, "field 'layers': no layers");

  Table table;
  table.columns = {"layer", "h", "predicted_loss", "measured_loss", "param_ratio"};
  auto emit = [&](std::size_t i, std::size_t h) {
    const StudyLayer& c = cases[i];
    const double predicted = familial::TruncationLoss(c.svd.sigma, h);
    const double measured = Measured(c, h);
    CheckAgreement(i, h, predicted, measured, c.energy);
    table.AddRow({static_cast<std::int64_t>(i), static_cast<std::int64_t>(h), predicted, measured,
                  familial::ParameterRatio(shapes[i].rows, shapes[i].cols, h)});
  };

  if (mode == "sweep") {
    for (std::size_t i = 0; i < cases.size(); ++i)
      for (std::size_t h = 1; h <= cases[i].svd.sigma.size(); ++h) emit(i, h);
  } else {
    std::vector<std::vector<double>> sigmas;
    for (const auto& c : cases) sigmas.push_back(c.svd.sigma);
    const familial::RankAllocation a = familial::AllocateRanks(sigmas, shapes, cfg.At("budget").U64());
    spdlog::info("budget {} uses {} parameters", a.budget, a.parameters_used);
    for (std::size_t i = 0; i < cases.size(); ++i) emit(i, a.per_layer_rank[i]);
  }

  RunOutput out("decompose", options, seed);
  out.WriteTable("decompose", table);
  out.Finish();
  return out.dir();
}

}  // namespace aiflow::cli
