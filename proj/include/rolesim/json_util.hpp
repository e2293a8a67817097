// Copyright 2026 The rolesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace rolesim {

using json = nlohmann::json;

/// Finds the first balanced top-level JSON object in free-form model output
/// (fenced or embedded in prose) and parses it. Returns nullopt when no
/// parseable object exists.
std::optional<json> extract_json_object(std::string_view text);

/// Non-empty string member or nullopt.
std::optional<std::string> string_member(const json& obj, std::string_view key);

}  // namespace rolesim
