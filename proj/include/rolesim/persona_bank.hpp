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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/json_util.hpp"

namespace rolesim {

/// Structured persona attributes: demographics, occupation, personality,
/// values, interests and experiences.
struct PersonaFacts {
  std::string demographics;
  std::string occupation;
  std::vector<std::string> personality;
  std::vector<std::string> values;
  std::vector<std::string> interests;
  std::vector<std::string> experiences;

  bool operator==(const PersonaFacts&) const = default;
};

struct Persona {
  std::string id;
  std::string name;
  std::string narrative;
  PersonaFacts facts;

  bool operator==(const Persona&) const = default;
};

/// Immutable after load; iteration order is file order.
class PersonaBank {
 public:
  PersonaBank(std::vector<Persona> personas, std::string source_path);

  const std::vector<Persona>& personas() const noexcept { return personas_; }
  const std::string& source_path() const noexcept { return source_path_; }
  std::size_t size() const noexcept { return personas_.size(); }
  const Persona* find(std::string_view id) const;

 private:
  std::vector<Persona> personas_;
  std::string source_path_;
};

json to_json(const Persona& p);

// Validates one record. `line` is 1-based and only used for error context.
Persona persona_from_json(const json& j, long line);

// Throws SchemaViolation(line, field) for the first invalid field.
void validate_persona(const Persona& p, long line);

PersonaBank parse_bank(std::string_view jsonl, std::string source_path);
PersonaBank load_bank(const std::filesystem::path& path);

/// One persona per line, trailing newline; parse_bank(serialize_bank(b)) == b.
std::string serialize_bank(const PersonaBank& bank);

/// Seeded Fisher-Yates prefix: n distinct personas, deterministic in
/// (bank, n, seed) including order.
std::vector<Persona> sample_personas(const PersonaBank& bank, std::size_t n,
                                     std::uint64_t seed);

/// Full narrative plus facts, the text the protagonist prompt is grounded on.
std::string persona_summary(const Persona& p);

}  // namespace rolesim
