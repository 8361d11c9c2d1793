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

#include <ctime>

#include "aiflow/cli/commands.h"
#include "aiflow/io/binary.h"
#include "json.hpp"

namespace aiflow::cli {
namespace {

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace

Format ParseFormat(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  Fail(ErrorCode::kConfigError, "unknown format '" + std::string(name) + "' (csv, json)");
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidScenario:
    case ErrorCode::kInvalidInput:
    case ErrorCode::kInvalidRank:
    case ErrorCode::kBudgetTooSmall:
    case ErrorCode::kInvalidToken:
    case ErrorCode::kSchemaError:
      return 2;
    case ErrorCode::kIoError:
    case ErrorCode::kIncompleteRun:
    case ErrorCode::kMalformedBitstream:
      return 3;
    default:
      return 4;
  }
}

RunOutput::RunOutput(std::string command, const CommandOptions& options, std::uint64_t seed)
    : command_(std::move(command)), options_(options), seed_(seed), dir_(options.out),
      started_at_(UtcNow()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  Require(!ec, ErrorCode::kIoError, "cannot create output directory " + dir_.string());
  // A stale manifest would mark a half-written run as complete.
  std::filesystem::remove(dir_ / "manifest.json", ec);
}

std::filesystem::path RunOutput::WriteTable(const std::string& name, const Table& table) {
  return options_.format == Format::kCsv ? WriteText(name + ".csv", ToCsv(table))
                                         : WriteText(name + ".json", ToJson(table));
}

std::filesystem::path RunOutput::WriteText(const std::string& file_name, std::string_view content) {
  const std::filesystem::path path = dir_ / file_name;
  WriteFileText(path, content);
  files_.push_back(file_name);
  return path;
}

void RunOutput::Finish() {
  nlohmann::ordered_json m;
  m["command"] = command_;
  m["config"] = options_.config.string();
  m["seed"] = seed_;
  m["tool_version"] = std::string(kToolVersion);
  m["out_dir"] = dir_.string();
  m["started_at"] = started_at_;
  m["finished_at"] = UtcNow();
  m["files"] = files_;
  const std::filesystem::path tmp = dir_ / "manifest.json.tmp";
  WriteFileText(tmp, m.dump(2) + "\n");
  std::error_code ec;
  std::filesystem::rename(tmp, dir_ / "manifest.json", ec);
  Require(!ec, ErrorCode::kIoError, "cannot finalize manifest in " + dir_.string());
}

Manifest ReadManifest(const std::filesystem::path& run_dir) {
  const std::filesystem::path path = run_dir / "manifest.json";
  Require(std::filesystem::exists(path), ErrorCode::kIncompleteRun,
          run_dir.string() + " has no manifest.json (run missing or unfinished)");
  Manifest out;
  try {
    const auto doc = nlohmann::json::parse(ReadFileText(path));
    out.command = doc.at("command").get<std::string>();
    out.config = doc.at("config").get<std::string>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.tool_version = doc.at("tool_version").get<std::string>();
    out.files = doc.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIncompleteRun, path.string() + " is unreadable: " + e.what());
  }
  return out;
}

}  // namespace aiflow::cli
