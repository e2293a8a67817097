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

#include "rolesim/persona_bank.hpp"

#include <numeric>
#include <unordered_set>

#include "rolesim/error.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

[[noreturn]] void schema_violation(long line, const std::string& field,
                                   const std::string& why) {
  Error err(ErrorCode::kSchemaViolation,
            "line " + std::to_string(line) + ", field '" + field + "': " + why);
  err.with_line(line).with_field(field);
  throw err;
}

std::string required_string(const json& j, const char* key, long line,
                            const std::string& field) {
  auto it = j.find(key);
  if (it == j.end()) schema_violation(line, field, "missing");
  if (!it->is_string()) schema_violation(line, field, "not a string");
  return it->get<std::string>();
}

std::vector<std::string> required_list(const json& j, const char* key, long line,
                                       const std::string& field) {
  auto it = j.find(key);
  if (it == j.end()) schema_violation(line, field, "missing");
  if (!it->is_array()) schema_violation(line, field, "not an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) schema_violation(line, field, "non-string element");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void check_text(std::string_view value, long line, const std::string& field) {
  if (is_blank(value)) schema_violation(line, field, "blank");
}

void check_list(const std::vector<std::string>& values, long line,
                const std::string& field) {
  if (values.empty()) schema_violation(line, field, "empty list");
  for (const auto& v : values) {
    if (is_blank(v)) schema_violation(line, field, "blank element");
  }
}

bool name_mentioned(const Persona& p) {
  if (contains(p.narrative, p.name)) return true;
  const auto& f = p.facts;
  auto in_list = [&](const std::vector<std::string>& xs) {
    for (const auto& x : xs) {
      if (contains(x, p.name)) return true;
    }
    return false;
  };
  return contains(f.demographics, p.name) || contains(f.occupation, p.name) ||
         in_list(f.personality) || in_list(f.values) || in_list(f.interests) ||
         in_list(f.experiences);
}

}  // namespace

PersonaBank::PersonaBank(std::vector<Persona> personas, std::string source_path)
    : personas_(std::move(personas)), source_path_(std::move(source_path)) {
  if (personas_.empty()) fail(ErrorCode::kEmptyBank, "bank has no personas");
  std::unordered_set<std::string> seen;
  for (const auto& p : personas_) {
    if (!seen.insert(p.id).second) {
      Error err(ErrorCode::kDuplicateId, "duplicate persona id '" + p.id + "'");
      err.with_field(p.id);
      throw err;
    }
  }
}

const Persona* PersonaBank::find(std::string_view id) const {
  for (const auto& p : personas_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

json to_json(const Persona& p) {
  return json{{"id", p.id},
              {"name", p.name},
              {"narrative", p.narrative},
              {"facts",
               {{"demographics", p.facts.demographics},
                {"occupation", p.facts.occupation},
                {"personality", p.facts.personality},
                {"values", p.facts.values},
                {"interests", p.facts.interests},
                {"experiences", p.facts.experiences}}}};
}

void validate_persona(const Persona& p, long line) {
  check_text(p.id, line, "id");
  check_text(p.name, line, "name");
  check_text(p.narrative, line, "narrative");
  check_text(p.facts.demographics, line, "demographics");
  check_text(p.facts.occupation, line, "occupation");
  check_list(p.facts.personality, line, "personality");
  check_list(p.facts.values, line, "values");
  check_list(p.facts.interests, line, "interests");
  check_list(p.facts.experiences, line, "experiences");
  if (!name_mentioned(p)) {
    schema_violation(line, "name", "name appears in neither narrative nor facts");
  }
}

Persona persona_from_json(const json& j, long line) {
  if (!j.is_object()) schema_violation(line, "record", "not a JSON object");
  Persona p;
  p.id = required_string(j, "id", line, "id");
  p.name = required_string(j, "name", line, "name");
  p.narrative = required_string(j, "narrative", line, "narrative");
  auto facts = j.find("facts");
  if (facts == j.end()) schema_violation(line, "facts", "missing");
  if (!facts->is_object()) schema_violation(line, "facts", "not an object");
  p.facts.demographics = required_string(*facts, "demographics", line, "demographics");
  p.facts.occupation = required_string(*facts, "occupation", line, "occupation");
  p.facts.personality = required_list(*facts, "personality", line, "personality");
  p.facts.values = required_list(*facts, "values", line, "values");
  p.facts.interests = required_list(*facts, "interests", line, "interests");
  p.facts.experiences = required_list(*facts, "experiences", line, "experiences");
  validate_persona(p, line);
  return p;
}

PersonaBank parse_bank(std::string_view jsonl, std::string source_path) {
  std::vector<Persona> personas;
  std::unordered_set<std::string> ids;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) schema_violation(line_no, "record", "invalid JSON");
    Persona p = persona_from_json(j, line_no);
    if (!ids.insert(p.id).second) {
      Error err(ErrorCode::kDuplicateId, "duplicate persona id '" + p.id +
                                             "' at line " + std::to_string(line_no));
      err.with_field(p.id).with_line(line_no);
      throw err;
    }
    personas.push_back(std::move(p));
  }
  if (personas.empty()) fail(ErrorCode::kEmptyBank, source_path + " has no records");
  return PersonaBank(std::move(personas), std::move(source_path));
}

PersonaBank load_bank(const std::filesystem::path& path) {
  return parse_bank(read_file(path), path.string());
}

std::string serialize_bank(const PersonaBank& bank) {
  std::string out;
  for (const auto& p : bank.personas()) {
    out += to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<Persona> sample_personas(const PersonaBank& bank, std::size_t n,
                                     std::uint64_t seed) {
  if (n > bank.size()) {
    fail(ErrorCode::kSampleTooLarge, "requested " + std::to_string(n) +
                                         " personas from a bank of " +
                                         std::to_string(bank.size()));
  }
  std::vector<std::size_t> index(bank.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  SeededRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(index.size() - i));
    std::swap(index[i], index[j]);
  }
  std::vector<Persona> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(bank.personas()[index[i]]);
  return out;
}

std::string persona_summary(const Persona& p) {
  const auto& f = p.facts;
  std::string out = "Name: " + p.name + "\n\n" + trim(p.narrative) + "\n\nFacts:\n";
  out += "- Demographics: " + f.demographics + "\n";
  out += "- Occupation: " + f.occupation + "\n";
  out += "- Personality: " + join(f.personality, "; ") + "\n";
  out += "- Values: " + join(f.values, "; ") + "\n";
  out += "- Interests: " + join(f.interests, "; ") + "\n";
  out += "- Experiences: " + join(f.experiences, "; ");
  return out;
}

}  // namespace rolesim
