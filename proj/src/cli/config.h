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

#ifndef AIFLOW_SRC_CLI_CONFIG_H_
#define AIFLOW_SRC_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace aiflow::cli {

// Thin accessors over a parsed config; failures are config-errors naming the
// dotted field path.
class ConfigNode {
 public:
  ConfigNode(const nlohmann::json* j, std::string path) : j_(j), path_(std::move(path)) {}

  bool Has(const std::string& key) const;
  ConfigNode At(const std::string& key) const;  // required member
  ConfigNode Index(std::size_t i) const;
  std::size_t Size() const;  // array length

  std::uint64_t U64() const;
  double Real() const;
  std::string String() const;

  std::uint64_t U64Or(const std::string& key, std::uint64_t fallback) const;
  double RealOr(const std::string& key, double fallback) const;
  std::string StringOr(const std::string& key, const std::string& fallback) const;

  const nlohmann::json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

 private:
  const nlohmann::json* j_;
  std::string path_;
};

nlohmann::json ReadConfigJson(const std::filesystem::path& path);

// --seed wins over the config's "seed", which defaults to 0.
std::uint64_t ResolveSeed(const nlohmann::json& config, std::optional<std::uint64_t> flag);

}  // namespace aiflow::cli

#endif  // AIFLOW_SRC_CLI_CONFIG_H_
