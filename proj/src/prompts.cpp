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

#include "rolesim/prompts.hpp"

#include <mutex>

#include "rolesim/error.hpp"
#include "rolesim/text.hpp"

namespace rolesim::prompts {

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Length of the placeholder starting at text[i] == '{', or 0.
std::size_t placeholder_at(std::string_view text, std::size_t i) {
  std::size_t j = i + 1;
  while (j < text.size() && is_name_char(text[j])) ++j;
  if (j == i + 1 || j >= text.size() || text[j] != '}') return 0;
  return j - i + 1;
}

Template parse_template(std::string name, std::string_view raw) {
  const std::string_view sys_tag = "[system]\n";
  const std::string_view user_tag = "\n[user]\n";
  const auto s = raw.find(sys_tag);
  const auto u = raw.find(user_tag);
  if (s != 0 || u == std::string_view::npos) {
    fail(ErrorCode::kParseError, "prompt asset '" + name + "' lacks [system]/[user] sections");
  }
  Template t;
  t.name = std::move(name);
  t.system = trim(raw.substr(sys_tag.size(), u - sys_tag.size()));
  t.user = trim(raw.substr(u + user_tag.size()));
  return t;
}

}  // namespace

const Template& get(std::string_view name) {
  static const std::map<std::string, Template, std::less<>> parsed = [] {
    std::map<std::string, Template, std::less<>> out;
    for (const auto& [key, raw] : builtin_assets()) out.emplace(key, parse_template(key, raw));
    return out;
  }();
  auto it = parsed.find(name);
  require(it != parsed.end(), "unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

std::string render(std::string_view text, const Values& values) {
  std::string out;
  out.reserve(text.size() * 2);
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '{') {
      if (std::size_t len = placeholder_at(text, i)) {
        const std::string_view key = text.substr(i + 1, len - 2);
        auto it = values.find(key);
        if (it == values.end()) {
          fail_field(ErrorCode::kMissingPlaceholder, std::string(key),
                     "no value for placeholder {" + std::string(key) + "}");
        }
        out.append(it->second);
        i += len;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    if (std::size_t len = placeholder_at(text, i)) {
      std::string key(text.substr(i + 1, len - 2));
      bool seen = false;
      for (const auto& k : out) seen = seen || k == key;
      if (!seen) out.push_back(std::move(key));
      i += len - 1;
    }
  }
  return out;
}

std::vector<ChatMessage> render_messages(std::string_view name, const Values& values) {
  const Template& t = get(name);
  return {ChatMessage{Role::kSystem, render(t.system, values)},
          ChatMessage{Role::kUser, render(t.user, values)}};
}

std::string flatten(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += m.content;
  }
  return out;
}

}  // namespace rolesim::prompts
