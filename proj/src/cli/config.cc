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

#include "config.h"

#include "aiflow/error.h"
#include "aiflow/io/binary.h"

namespace aiflow::cli {
namespace {

[[noreturn]] void Bad(const std::string& path, const std::string& what) {
  Fail(ErrorCode::kConfigError, "field '" + (path.empty() ? "<root>" : path) + "': " + what);
}

std::string Child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

}  // namespace

bool ConfigNode::Has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

ConfigNode ConfigNode::At(const std::string& key) const {
  if (!j_->is_object()) Bad(path_, "expected an object");
  const auto it = j_->find(key);
  if (it == j_->end()) Bad(Child(path_, key), "missing");
  return ConfigNode(&*it, Child(path_, key));
}

ConfigNode ConfigNode::Index(std::size_t i) const {
  if (!j_->is_array() || i >= j_->size()) Bad(path_, "expected an array with index " + std::to_string(i));
  return ConfigNode(&(*j_)[i], path_ + "[" + std::to_string(i) + "]");
}

std::size_t ConfigNode::Size() const {
  if (!j_->is_array()) Bad(path_, "expected an array");
  return j_->size();
}

std::uint64_t ConfigNode::U64() const {
  if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
  if (j_->is_number_integer() && j_->get<std::int64_t>() >= 0) return j_->get<std::uint64_t>();
  Bad(path_, "expected a non-negative integer");
}

double ConfigNode::Real() const {
  if (!j_->is_number()) Bad(path_, "expected a number");
  return j_->get<double>();
}

std::string ConfigNode::String() const {
  if (!j_->is_string()) Bad(path_, "expected a string");
  return j_->get<std::string>();
}

std::uint64_t ConfigNode::U64Or(const std::string& key, std::uint64_t fallback) const {
  return Has(key) ? At(key).U64() : fallback;
}

double ConfigNode::RealOr(const std::string& key, double fallback) const {
  return Has(key) ? At(key).Real() : fallback;
}

std::string ConfigNode::StringOr(const std::string& key, const std::string& fallback) const {
  return Has(key) ? At(key).String() : fallback;
}

nlohmann::json ReadConfigJson(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  try {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.is_object()) Fail(ErrorCode::kConfigError, path.string() + ": expected a JSON object");
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

std::uint64_t ResolveSeed(const nlohmann::json& config, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  return ConfigNode(&config, "").U64Or("seed", 0);
}

}  // namespace aiflow::cli
