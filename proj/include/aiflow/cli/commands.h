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

#ifndef AIFLOW_CLI_COMMANDS_H_
#define AIFLOW_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aiflow/cli/table.h"
#include "aiflow/error.h"
#include "aiflow/familial/decompose.h"
#include "aiflow/numerics/linalg.h"

namespace aiflow::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Format { kCsv, kJson };
Format ParseFormat(std::string_view name);

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::filesystem::path out = "out";
  Format format = Format::kCsv;
};

// 0 success, 2 bad configuration or input, 3 io, 4 internal invariant.
int ExitCodeFor(ErrorCode code);

// Collects the files of one run and writes manifest.json last, atomically
// (temp file + rename), as the completion marker.
class RunOutput {
 public:
  RunOutput(std::string command, const CommandOptions& options, std::uint64_t seed);

  // name.csv or name.json depending on the format.
  std::filesystem::path WriteTable(const std::string& name, const Table& table);
  std::filesystem::path WriteText(const std::string& file_name, std::string_view content);
  void Finish();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::string command_;
  CommandOptions options_;
  std::uint64_t seed_;
  std::filesystem::path dir_;
  std::string started_at_;
  std::vector<std::string> files_;
};

struct Manifest {
  std::string command;
  std::string config;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> files;
};
// Missing or unreadable manifest -> incomplete-run.
Manifest ReadManifest(const std::filesystem::path& run_dir);

// The synthetic layers behind `decompose`: Gaussian W (m x n) and correlated
// calibration inputs X = A Z (n x samples), drawn from Rng::Derive(seed, {i}).
struct StudyLayer {
  Matrix w;
  Matrix x;
  familial::WhiteningContext ctx;
  SvdResult svd;
  double energy = 0.0;  // ||W X||_F^2
};
StudyLayer MakeStudyLayer(std::uint64_t seed, std::size_t index, std::size_t rows, std::size_t cols,
                          std::size_t samples, double ridge);

// Each command returns the run directory it filled.
std::filesystem::path RunDecompose(const CommandOptions& options);
std::filesystem::path RunSpecdec(const CommandOptions& options);
std::filesystem::path RunTofc(const CommandOptions& options);
std::filesystem::path RunSimulate(const CommandOptions& options);
std::filesystem::path RunReport(const std::vector<std::filesystem::path>& run_dirs,
                                const CommandOptions& options);

// Unigram total-variation distance between two token streams.
double UnigramTv(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                 std::size_t vocab_size);

}  // namespace aiflow::cli

#endif  // AIFLOW_CLI_COMMANDS_H_
