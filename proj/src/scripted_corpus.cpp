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

#include "rolesim/scripted_corpus.hpp"

#include <algorithm>
#include <array>

#include "rolesim/agents.hpp"
#include "rolesim/error.hpp"
#include "rolesim/simulation.hpp"
#include "rolesim/text.hpp"

namespace rolesim::corpus {

namespace {

constexpr std::array<const char*, 8> kNpcNames = {"Selina", "Marcus", "Priya", "Tomasz",
                                                  "Aiko",   "Daniel", "Ines",  "Kwame"};

constexpr std::array<const char*, 4> kPlaces = {
    "the community center hall", "a busy neighborhood cafe", "the public library reading room",
    "a farmers market on the main square"};

std::string lower_first(std::string s) {
  if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

struct NpcInfo {
  std::string id;
  std::string name;
};

std::vector<NpcInfo> npcs_for(std::size_t persona_index) {
  std::vector<NpcInfo> out;
  for (std::size_t k = 0; k < npc_count(persona_index); ++k) {
    const std::string name = kNpcNames[(persona_index * 3 + k) % kNpcNames.size()];
    out.push_back(NpcInfo{slugify(to_lower(name)), name});
  }
  return out;
}

std::string scene_json(const Persona& p, std::size_t index) {
  const std::string place = kPlaces[index % kPlaces.size()];
  json npcs = json::array();
  json openings = json::object();
  json positions = json::object();
  json emotions = json::object();
  openings["protagonist"] = p.name + " arrives and looks around for a familiar face.";
  positions["protagonist"] = "by the entrance";
  emotions["protagonist"] = "hopeful";
  for (const auto& n : npcs_for(index)) {
    npcs.push_back({{"id", n.id},
                    {"name", n.name},
                    {"sketch", n.name + " is a regular at " + place + " who knows " + p.name +
                                   " from around town and shares an interest in " +
                                   p.facts.interests.front() + "."},
                    {"goal", "Find out how " + p.name + " has been lately."}});
    openings[n.id] = n.name + " waves from across the room.";
    positions[n.id] = "near the window";
    emotions[n.id] = "friendly";
  }
  json doc{{"event_description", "A small neighborhood gathering about a new local project brings " +
                                     p.name + " together with a few acquaintances."},
           {"time", "Saturday, late morning"},
           {"place", place},
           {"protagonist_sketch", p.name + ", " + p.facts.demographics + ", " + p.facts.occupation + "."},
           {"npcs", npcs},
           {"initial_actions", openings},
           {"positions", positions},
           {"emotional_states", emotions},
           {"environment_facts", {"Chairs are arranged in a loose circle.", "A table holds coffee and brochures."}}};
  return "Here is the scene.\n" + doc.dump(2);
}

// In odd rounds the protagonist acts and an NPC responds; in even rounds that
// NPC acts and the protagonist responds.
std::string npc_name_for_round(std::size_t persona_index, int round) {
  const auto npcs = npcs_for(persona_index);
  const int odd = round % 2 == 1 ? round : round - 1;
  return npcs[static_cast<std::size_t>((odd - 1) / 2) % npcs.size()].name;
}

json text(std::string s) { return json(std::move(s)); }

void push(json& script, const std::string& tag, json entry) {
  if (!script.contains(tag)) script[tag] = json::array();
  script[tag].push_back(std::move(entry));
}

}  // namespace

std::size_t npc_count(std::size_t persona_index) { return 2 + persona_index % 2; }

std::string evidence_phrase(const Persona& p, Dimension d) {
  switch (d) {
    case Dimension::kBackground: return "I have been working as " + lower_first(p.facts.occupation);
    case Dimension::kPersonality: return "people tell me I am " + lower_first(p.facts.personality.front());
    case Dimension::kValues: return "what matters most to me is " + lower_first(p.facts.values.front());
    case Dimension::kInterests: return "lately my free time goes to " + lower_first(p.facts.interests.front());
    case Dimension::kExperiences: return "years ago I " + lower_first(p.facts.experiences.front());
  }
  return {};
}

std::optional<Dimension> scheduled_dimension(int round, int quorum_round) {
  require(quorum_round == 4 || quorum_round == 5, "quorum_round must be 4 or 5");
  // Background first, then three consecutive rounds ending at quorum_round,
  // then Experiences.
  if (round == 1) return Dimension::kBackground;
  if (round == quorum_round - 2) return Dimension::kPersonality;
  if (round == quorum_round - 1) return Dimension::kValues;
  if (round == quorum_round) return Dimension::kInterests;
  if (round == quorum_round + 1) return Dimension::kExperiences;
  return std::nullopt;
}

std::string protagonist_line(const Persona& p, std::size_t model_index, int round,
                             int quorum_round) {
  const auto d = scheduled_dimension(round, quorum_round);
  const std::string body = d ? evidence_phrase(p, *d)
                             : "that sounds good to me, tell me more about it";
  switch (model_index % 3) {
    case 0:
      return "\"Honestly, " + body + ",\" " + p.name + " says with a warm smile.";
    case 1:
      return "\"Well, " + body + ",\" " + p.name + " replies, glancing at the others.";
    default:
      return p.name + " nods slowly. \"You know, " + body + ".\"";
  }
}

bool persona_disputed(std::size_t persona_index) { return persona_index % 2 == 0; }

int judge_value(std::size_t model_index, std::size_t persona_index, std::size_t judge_index,
                std::size_t judge_count, Metric m, const Options& options) {
  const auto k = static_cast<std::size_t>(m);
  if (m == options.disputed_metric && persona_disputed(persona_index) && judge_count >= 2) {
    if (judge_index == 0) return 1;
    if (judge_index == judge_count - 1) return 5;
    return 3;
  }
  int base = 4 - static_cast<int>(model_index) - ((k + persona_index) % 2 == 0 ? 0 : 1);
  base = std::clamp(base, 1, 4);
  const int bump = judge_index + 1 == judge_count && k % 3 == 0 ? 1 : 0;
  return base + bump;
}

Script build_script(const std::vector<Persona>& personas, const Options& o) {
  require(o.max_turns >= 1, "max_turns must be >= 1");
  json script = json::object();
  for (std::size_t pi = 0; pi < personas.size(); ++pi) {
    const Persona& p = personas[pi];
    push(script, scoped_tag(slugify(p.id), "env.scene"), text(scene_json(p, pi)));

    for (std::size_t mi = 0; mi < o.protagonists.size(); ++mi) {
      for (int rep = 0; rep < o.repeats; ++rep) {
        const std::string id = episode_id(o.protagonists[mi], p.id, rep);
        const std::string scope = slugify(id);
        auto tag = [&](const std::string& base, int round) {
          return scoped_tag(scope, base + ".r" + std::to_string(round));
        };
        for (int r = 1; r <= o.max_turns; ++r) {
          const std::string npc_name = npc_name_for_round(pi, r);
          std::string line = protagonist_line(p, mi, r, o.quorum_round);
          std::string raw = mi % 2 == 1 ? "<think>Stay in character and keep it short.</think>\n" + line
                                        : line;
          const std::string npc_line = "\"It is good to see you, " + p.name + ",\" " + npc_name +
                                       " says in round " + std::to_string(r) + ".";
          const bool odd = r % 2 == 1;
          if (odd) {
            if (o.inject_transient && pi == 0 && mi == 0 && rep == 0 && r == 1) {
              push(script, tag("protagonist.act", r), json{{"fail", "transient"}});
            }
            push(script, tag("protagonist.act", r), text(raw));
            push(script, tag("env.influence", r),
                 text(json{{"responder", npc_name},
                           {"impact", npc_name + " feels addressed and wants to answer."}}.dump()));
            push(script, tag("npc.react", r), text(npc_line));
          } else {
            push(script, tag("npc.act", r), text(npc_line));
            push(script, tag("env.influence", r),
                 text(json{{"responder", "protagonist"},
                           {"impact", p.name + " is asked directly and is expected to reply."}}.dump()));
            push(script, tag("protagonist.react", r), text(raw));
          }
          push(script, tag("env.summary", r),
               text("In round " + std::to_string(r) + ", " + p.name + " and " + npc_name +
                    " traded a few friendly words about the project."));
          push(script, tag("protagonist.beliefs", r),
               text(json{{"self_belief", "I am " + p.name + " and I stay true to myself."},
                         {"env_belief", "After round " + std::to_string(r) + " the group feels at ease."},
                         {"desire", "Keep the conversation going."},
                         {"intention", "Share a little more about myself."}}.dump()));
          // NPCs may not revise their self-belief; the extra key is ignored.
          push(script, tag("npc.beliefs", r),
               text(json{{"self_belief", "I have become someone else."},
                         {"env_belief", p.name + " seems relaxed in round " + std::to_string(r) + "."}}.dump()));
          for (int k = 0; k < 2; ++k) {
            push(script, tag("env.character_state", r),
                 text(json{{"position", "near the coffee table"},
                           {"emotional_state", k == 0 ? "engaged" : "curious"}}.dump()));
          }
          json env = r == 3 ? json{{"affects_environment", true},
                                   {"environment_facts",
                                    {"Chairs are arranged in a loose circle.",
                                     "A brochure lies on the floor with coffee spilled on it."}}}
                            : json{{"affects_environment", false}};
          push(script, tag("env.environment", r), text(env.dump()));
          json dims = json::object();
          const auto d = scheduled_dimension(r, o.quorum_round);
          for (Dimension dim : kDimensions) {
            const bool hit = d && *d == dim;
            dims[std::string(to_string(dim))] = {{"new_evidence", hit},
                                                 {"quote", hit ? evidence_phrase(p, dim) : ""}};
          }
          push(script, tag("env.turn_control", r), text(json{{"dimensions", dims}}.dump()));
        }

        // Evaluation of this episode.
        const std::size_t jc = o.judges.size();
        for (std::size_t ji = 0; ji < jc; ++ji) {
          json scores = json::object();
          for (Metric m : kMetrics) {
            scores[std::string(to_string(m))] = judge_value(mi, pi, ji, jc, m, o);
          }
          const std::string judge = "judge." + slugify(o.judges[ji]);
          push(script, scoped_tag(scope, judge + ".score"), text(scores.dump()));
          if (persona_disputed(pi) && jc >= 2 && (ji == 0 || ji + 1 == jc)) {
            json evidence = json::array({evidence_phrase(p, Dimension::kBackground)});
            if (ji + 1 == jc) evidence.push_back("a sentence nobody ever said");
            push(script, scoped_tag(scope, judge + ".critic"),
                 text(json{{"score", judge_value(mi, pi, ji, jc, o.disputed_metric, o)},
                           {"justification", ji == 0 ? "The protagonist barely varies their responses."
                                                     : "The protagonist draws on their own life in every exchange."},
                           {"evidence", evidence}}.dump()));
          }
        }
        if (persona_disputed(pi) && jc >= 2) {
          push(script, scoped_tag(scope, "arbiter.arbitrate"),
               text(json{{"score", kRefereeScore},
                         {"rationale", "Both critics cite real moments; the range of behavior is solid but not exceptional."}}.dump()));
        }
      }
    }
  }
  return parse_script(script);
}

}  // namespace rolesim::corpus
