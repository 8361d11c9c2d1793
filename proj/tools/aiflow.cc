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

// aiflow: command-line front end for the decomposition, speculative decoding,
// feature compression and network simulation studies.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "aiflow/cli/commands.h"

namespace {

using aiflow::cli::CommandOptions;

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("aiflow");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("AIFLOW_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    if (level != "error") std::cerr << "AIFLOW_LOG='" << level << "' not recognized, using error\n";
    spdlog::set_level(spdlog::level::err);
  }
}

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out = "out";
  std::string format = "csv";
};

CLI::App* AddRunCommand(CLI::App& app, const std::string& name, const std::string& help, Flags& f) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", f.config, "JSON config file")->required();
  f.seed_opt = sub->add_option("--seed", f.seed, "seed (overrides the config)");
  sub->add_option("--out", f.out, "output directory")->capture_default_str();
  sub->add_option("--format", f.format, "table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  return sub;
}

CommandOptions ToOptions(const Flags& f) {
  CommandOptions o;
  o.config = f.config;
  if (f.seed_opt != nullptr && f.seed_opt->count() > 0) o.seed = f.seed;
  o.out = f.out;
  o.format = aiflow::cli::ParseFormat(f.format);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"aiflow: device-edge-cloud collaboration studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aiflow::cli::kToolVersion));

  Flags decompose, specdec, tofc, simulate;
  CLI::App* decompose_cmd =
      AddRunCommand(app, "decompose", "low-rank layer decomposition sweep or budget", decompose);
  CLI::App* specdec_cmd = AddRunCommand(app, "specdec", "speculative decoding configurations", specdec);
  CLI::App* tofc_cmd = AddRunCommand(app, "tofc", "feature compression sweep", tofc);
  CLI::App* simulate_cmd = AddRunCommand(app, "simulate", "run one network scenario", simulate);

  std::vector<std::string> run_dirs;
  std::string report_out = "report";
  CLI::App* report_cmd = app.add_subcommand("report", "merge finished runs into plot-ready tables");
  report_cmd->add_option("runs", run_dirs, "run directories")->required();
  report_cmd->add_option("--out", report_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::filesystem::path dir;
    if (decompose_cmd->parsed()) {
      dir = aiflow::cli::RunDecompose(ToOptions(decompose));
    } else if (specdec_cmd->parsed()) {
      dir = aiflow::cli::RunSpecdec(ToOptions(specdec));
    } else if (tofc_cmd->parsed()) {
      dir = aiflow::cli::RunTofc(ToOptions(tofc));
    } else if (simulate_cmd->parsed()) {
      dir = aiflow::cli::RunSimulate(ToOptions(simulate));
    } else if (report_cmd->parsed()) {
      CommandOptions o;
      o.out = report_out;
      std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
      dir = aiflow::cli::RunReport(dirs, o);
    }
    std::cout << dir.string() << "\n";
    return 0;
  } catch (const aiflow::Error& e) {
    spdlog::error("{}", e.what());
    return aiflow::cli::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 4;
  }
}
