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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/gateway.hpp"

// Prompt templates live as text assets under assets/prompts/<version>/ and
// are compiled into the library. A template file has a "[system]" section and
// a "[user]" section. Placeholders are `{name}` with name in [a-z_]+; any
// other brace (JSON examples in the text) is literal.
namespace rolesim::prompts {

std::string_view asset_version();
const std::map<std::string, std::string, std::less<>>& builtin_assets();

struct Template {
  std::string name;
  std::string system;
  std::string user;
};

using Values = std::map<std::string, std::string, std::less<>>;

/// Parsed built-in template. Throws InvalidArgument for unknown names.
const Template& get(std::string_view name);

/// Single-pass substitution; substituted text is never rescanned. Throws
/// MissingPlaceholder when the text names a placeholder absent from
/// `values`.
std::string render(std::string_view text, const Values& values);

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

std::vector<ChatMessage> render_messages(std::string_view name, const Values& values);

/// The prompt as one string: system text, a blank line, user text.
std::string flatten(const std::vector<ChatMessage>& messages);

}  // namespace rolesim::prompts
