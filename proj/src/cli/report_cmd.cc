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
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "aiflow/cli/commands.h"
#include "aiflow/io/binary.h"
#include "json.hpp"

namespace aiflow::cli {
namespace {

struct RunTables {
  std::string run_id;
  Manifest manifest;
  std::map<std::string, Table> tables;  // file name -> contents
};

// Plot-ready series for the tables the tool itself writes: rows grouped by
// `group` columns, one (x, y) point per row.
struct SeriesSpec {
  std::string file;
  std::vector<std::string> group;
  std::string x;
  std::string y;
};

const std::vector<SeriesSpec>& KnownSeries() {
  static const std::vector<SeriesSpec> specs = {
      {"decompose.csv", {"layer"}, "h", "measured_loss"},
      {"decompose.csv", {"layer"}, "h", "predicted_loss"},
      {"specdec.csv", {"mode", "tiers"}, "gamma", "sim_tokens_per_s"},
      {"specdec.csv", {"mode", "tiers"}, "gamma", "acceptance_rate"},
      {"tofc.csv", {"bandwidth_bytes_per_s"}, "M", "payload_bytes"},
      {"tofc.csv", {"M"}, "bandwidth_bytes_per_s", "transmit_s"},
  };
  return specs;
}

std::string JoinColumns(const std::vector<std::string>& cols) {
  std::string out = "[";
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? ", " : "") + cols[i];
  return out + "]";
}

std::size_t ColumnIndex(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  return it == t.columns.end() ? t.columns.size() : static_cast<std::size_t>(it - t.columns.begin());
}

std::string Stem(const std::string& file) { return std::filesystem::path(file).stem().string(); }

}  // namespace

std::filesystem::path RunReport(const std::vector<std::filesystem::path>& run_dirs,
                                const CommandOptions& options) {
  Require(!run_dirs.empty(), ErrorCode::kConfigError, "report needs at least one run directory");
  std::vector<RunTables> runs;
  std::set<std::string> ids;
  for (const auto& dir : run_dirs) {
    RunTables run;
    run.manifest = ReadManifest(dir);
    std::string id = std::filesystem::path(dir).lexically_normal().filename().string();
    if (id.empty()) id = std::filesystem::path(dir).lexically_normal().parent_path().filename().string();
    const std::string base = id;
    for (std::size_t k = 2; !ids.insert(id).second; ++k) id = base + "_" + std::to_string(k);
    run.run_id = id;
    for (const std::string& file : run.manifest.files) {
      if (std::filesystem::path(file).extension() != ".csv") continue;
      const auto path = std::filesystem::path(dir) / file;
      run.tables[file] = ParseCsv(ReadFileText(path), path.string());
    }
    spdlog::info("run {}: {} with {} tables", run.run_id, run.manifest.command, run.tables.size());
    runs.push_back(std::move(run));
  }

  // File names in first-seen order.
  std::vector<std::string> files;
  for (const auto& run : runs)
    for (const auto& [file, table] : run.tables)
      if (std::find(files.begin(), files.end(), file) == files.end()) files.push_back(file);

  RunOutput out("report", options, runs.front().manifest.seed);
  nlohmann::ordered_json report;
  report["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : runs)
    report["runs"].push_back({{"run_id", run.run_id},
                              {"command", run.manifest.command},
                              {"config", run.manifest.config},
                              {"seed", run.manifest.seed}});
  report["tables"] = nlohmann::ordered_json::array();
  report["series"] = nlohmann::ordered_json::array();

  for (const std::string& file : files) {
    std::vector<const RunTables*> having;
    for (const auto& run : runs)
      if (run.tables.contains(file)) having.push_back(&run);
    Table merged;
    if (having.size() == 1) {
      merged = having.front()->tables.at(file);  // passthrough
    } else {
      const Table& first = having.front()->tables.at(file);
      for (const RunTables* run : having) {
        const Table& t = run->tables.at(file);
        Require(t.columns == first.columns, ErrorCode::kSchemaError,
                file + ": run " + having.front()->run_id + " has columns " +
                    JoinColumns(first.columns) + " but run " + run->run_id + " has " +
                    JoinColumns(t.columns));
      }
      merged.columns = first.columns;
      merged.columns.insert(merged.columns.begin(), "run_id");
      for (const RunTables* run : having) {
        for (const auto& row : run->tables.at(file).rows) {
          std::vector<Cell> r = row;
          r.insert(r.begin(), run->run_id);
          merged.rows.push_back(std::move(r));
        }
      }
    }
    out.WriteText(file, ToCsv(merged));
    report["tables"].push_back(
        {{"file", file}, {"columns", merged.columns}, {"rows", merged.rows.size()}});

    for (const SeriesSpec& pair : KnownSeries()) {
      if (pair.file != file) continue;
      std::vector<std::string> group = pair.group;
      if (having.size() > 1) group.insert(group.begin(), "run_id");
      std::vector<std::size_t> gi;
      for (const auto& g : group) gi.push_back(ColumnIndex(merged, g));
      const std::size_t xi = ColumnIndex(merged, pair.x);
      const std::size_t yi = ColumnIndex(merged, pair.y);
      const std::size_t ncol = merged.columns.size();
      if (xi == ncol || yi == ncol ||
          std::any_of(gi.begin(), gi.end(), [&](std::size_t i) { return i == ncol; })) {
        spdlog::info("{}: columns for {} vs {} not present, series skipped", file, pair.y, pair.x);
        continue;
      }
      Table series;
      series.columns = {"series", pair.x, pair.y};
      for (const auto& row : merged.rows) {
        std::string label;
        for (std::size_t k = 0; k < gi.size(); ++k)
          label += (k ? "/" : "") + group[k] + "=" + FormatCell(row[gi[k]]);
        series.rows.push_back({label, row[xi], row[yi]});
      }
      const std::string name = "series_" + Stem(file) + "_" + pair.y + "_vs_" + pair.x + ".csv";
      out.WriteText(name, ToCsv(series));
      report["series"].push_back({{"file", name}, {"source", file}, {"x", pair.x}, {"y", pair.y}});
    }
  }
  out.WriteText("report.json", report.dump(2) + "\n");
  out.Finish();
  return out.dir();
}

}  // namespace aiflow::cli
