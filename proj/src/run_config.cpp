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

#include "rolesim/run_config.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "rolesim/error.hpp"
#include "rolesim/backends.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

class LineParser {
 public:
  LineParser(std::string_view s, long line) : s_(s), line_(line) {}

  [[noreturn]] void error(const std::string& msg) const {
    Error e(ErrorCode::kParseError, "config line " + std::to_string(line_) + ": " + msg);
    e.with_line(line_);
    throw e;
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) error(std::string("expected '") + c + "'");
  }

  std::string key() {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == '"') return quoted();
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                              s_[i_] == '-' || s_[i_] == '.')) {
      ++i_;
    }
    if (i_ == start) error("expected a key");
    return std::string(s_.substr(start, i_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (i_ >= s_.size()) error("dangling escape");
        const char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: error(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (i_ >= s_.size()) error("unterminated string");
    ++i_;
    return out;
  }

  json scalar() {
    skip_ws();
    if (i_ >= s_.size()) error("expected a value");
    if (s_[i_] == '"') return quoted();
    const std::size_t start = i_;
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '#' && s_[i_] != ' ' &&
           s_[i_] != '\t') {
      ++i_;
    }
    const std::string_view tok = s_.substr(start, i_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    long iv = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
    if (ec == std::errc() && p == tok.data() + tok.size() && !tok.empty()) return iv;
    double dv = 0.0;
    auto [q, ec2] = std::from_chars(tok.data(), tok.data() + tok.size(), dv);
    if (ec2 == std::errc() && q == tok.data() + tok.size() && !tok.empty()) return dv;
    error("cannot read value '" + std::string(tok) + "'");
  }

  json value() {
    if (!eat('[')) return scalar();
    json arr = json::array();
    if (eat(']')) return arr;
    do {
      arr.push_back(scalar());
    } while (eat(','));
    expect(']');
    return arr;
  }

  void finish() {
    if (!at_end_or_comment()) error("unexpected trailing text");
  }

 private:
  std::string_view s_;
  long line_;
  std::size_t i_ = 0;
};

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  fail_field(ErrorCode::kConfigError, field, msg);
}

// Typed accessors over one section that also track unknown keys.
class Section {
 public:
  Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {}

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  std::string field(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void str(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) config_error(field(key), field(key) + " must be a string");
      out = v->get<std::string>();
    }
  }
  void path(const std::string& key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    str(key, s);
    if (!s.empty()) out = base / s;
  }
  template <typename T>
  void integer(const std::string& key, T& out, long min) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) config_error(field(key), field(key) + " must be an integer");
      const long x = v->get<long>();
      if (x < min) config_error(field(key), field(key) + " must be >= " + std::to_string(min));
      out = static_cast<T>(x);
    }
  }
  void real(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) config_error(field(key), field(key) + " must be a number");
      out = v->get<double>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) config_error(field(key), field(key) + " must be true or false");
      out = v->get<bool>();
    }
  }
  void list(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = {v->get<std::string>()};
        return;
      }
      if (!v->is_array()) config_error(field(key), field(key) + " must be a list of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) config_error(field(key), field(key) + " must be a list of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }
  void check_unknown() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.contains(k)) config_error(field(k), "unknown configuration key " + field(k));
    }
  }

 private:
  const json& obj_;
  std::string name_;
  std::set<std::string> seen_;
};

BackendConfig parse_backend(const std::string& name, Section& s, const std::filesystem::path& base,
                            std::filesystem::path& script_path) {
  BackendConfig b;
  b.name = name;
  std::string kind = "scripted";
  s.str("kind", kind);
  if (kind == "scripted") {
    b.kind = BackendKind::kScripted;
  } else if (kind == "http") {
    b.kind = BackendKind::kHttp;
  } else {
    config_error(s.field("kind"), "backend kind must be \"scripted\" or \"http\"");
  }
  s.str("base_url", b.base_url);
  s.str("api_key_env", b.api_key_env);
  s.integer("max_attempts", b.max_attempts, 1);
  s.integer("max_concurrency", b.max_concurrency, 1);
  s.real("requests_per_second", b.requests_per_second);
  long timeout = b.timeout.count();
  s.integer("timeout_s", timeout, 1);
  b.timeout = std::chrono::seconds(timeout);
  long initial = b.backoff.initial.count();
  long cap = b.backoff.cap.count();
  s.integer("backoff_initial_ms", initial, 0);
  s.integer("backoff_cap_ms", cap, 0);
  b.backoff.initial = std::chrono::milliseconds(initial);
  b.backoff.cap = std::chrono::milliseconds(cap);
  s.real("backoff_multiplier", b.backoff.multiplier);
  s.real("jitter", b.backoff.jitter);
  s.str("embedding_model", b.embedding_model);
  s.integer("embedding_dim", b.embedding_dim, 1);
  std::vector<std::string> open_markers;
  std::vector<std::string> close_markers;
  s.list("trace_open", open_markers);
  s.list("trace_close", close_markers);
  if (open_markers.size() != close_markers.size()) {
    config_error(s.field("trace_open"), "trace_open and trace_close must have equal length");
  }
  if (!open_markers.empty()) {
    b.trace_filter.markers.clear();
    for (std::size_t i = 0; i < open_markers.size(); ++i) {
      b.trace_filter.markers.push_back(TraceMarker{open_markers[i], close_markers[i]});
    }
  }
  s.list("trace_line_sigils", b.trace_filter.line_sigils);
  s.path("script", script_path, base);
  if (b.kind == BackendKind::kScripted && !script_path.empty()) {
    b.script = parse_script(json::parse(read_file(script_path)));
  }
  s.check_unknown();
  return b;
}

}  // namespace

json parse_config_document(std::string_view text) {
  json doc = json::object();
  std::string section;
  doc[section] = json::object();
  long line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    LineParser p(raw, line_no);
    if (p.at_end_or_comment()) continue;
    if (p.eat('[')) {
      section = p.key();
      p.expect(']');
      p.finish();
      if (doc.contains(section) && !doc[section].empty()) p.error("section [" + section + "] repeated");
      doc[section] = json::object();
      continue;
    }
    const std::string key = p.key();
    p.expect('=');
    json value = p.value();
    p.finish();
    if (doc[section].contains(key)) p.error("key '" + key + "' repeated");
    doc[section][key] = std::move(value);
  }
  if (doc[""].empty()) doc.erase("");
  return doc;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json doc = parse_config_document(text);
  RunConfig c;
  static const json kEmpty = json::object();
  auto section = [&](const std::string& name) -> const json& {
    auto it = doc.find(name);
    return it == doc.end() ? kEmpty : *it;
  };
  for (const auto& [name, body] : doc.items()) {
    if (name != "run" && name != "models" && name != "routing" && name != "turn_control" &&
        name != "evaluation" && name != "export" && name.rfind("backend.", 0) != 0) {
      config_error(name, "unknown configuration section [" + name + "]");
    }
  }

  Section run(section("run"), "run");
  run.path("bank", c.bank_path, base_dir);
  run.integer("sample", c.sample, 1);
  run.integer("seed", c.seed, 0);
  run.integer("repeats", c.repeats, 1);
  run.integer("parallelism", c.parallelism, 1);
  run.path("out", c.out_dir, base_dir);
  run.integer("memory_k", c.memory_k, 1);
  run.check_unknown();

  Section models(section("models"), "models");
  models.list("protagonists", c.protagonists);
  models.str("npc", c.npc_model);
  models.str("environment", c.environment_model);
  models.list("judges", c.judges);
  models.str("arbiter", c.arbiter);
  models.str("embedding", c.embedding_backend);
  models.real("agent_temperature", c.agent_temperature);
  models.real("judge_temperature", c.judge_temperature);
  models.integer("max_tokens", c.max_tokens, 1);
  models.check_unknown();

  for (const auto& [model, backend] : section("routing").items()) {
    if (!backend.is_string()) config_error("routing." + model, "routing values must be backend names");
    c.routing[model] = backend.get<std::string>();
  }

  Section tc(section("turn_control"), "turn_control");
  tc.integer("dim_quorum", c.turn_control.dim_quorum, 1);
  tc.integer("stall_rounds", c.turn_control.stall_rounds, 1);
  tc.integer("evidence_quorum", c.turn_control.evidence_quorum, 1);
  tc.integer("max_turns", c.turn_control.max_turns, 1);
  tc.boolean("early_stop", c.turn_control.early_stop_enabled);
  tc.check_unknown();

  Section ev(section("evaluation"), "evaluation");
  ev.real("threshold", c.threshold);
  ev.boolean("concurrent_judges", c.concurrent_judges);
  ev.check_unknown();

  Section ex(section("export"), "export");
  ex.integer("sft_top_k", c.sft_top_k, 0);
  ex.integer("dpo_top_n", c.dpo_top_n, 0);
  ex.check_unknown();

  for (const auto& [name, body] : doc.items()) {
    if (name.rfind("backend.", 0) != 0) continue;
    const std::string backend = name.substr(8);
    if (backend.empty()) config_error(name, "backend section without a name");
    Section s(body, name);
    std::filesystem::path script;
    c.backends.push_back(parse_backend(backend, s, base_dir, script));
    if (!script.empty()) c.script_paths[backend] = script;
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig c = parse_run_config(read_file(path), path.parent_path());
  c.config_path = path;
  return c;
}

void apply(RunConfig& c, const RunOverrides& o) {
  if (o.bank) c.bank_path = *o.bank;
  if (o.out) c.out_dir = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.repeats) c.repeats = *o.repeats;
  if (o.parallelism) c.parallelism = *o.parallelism;
  if (o.no_early_stop) c.turn_control.early_stop_enabled = false;
  if (o.judges) c.judges = *o.judges;
  if (o.arbiter) c.arbiter = *o.arbiter;
  if (o.threshold) c.threshold = *o.threshold;
}

std::string backend_for(const RunConfig& c, std::string_view model_id) {
  if (auto it = c.routing.find(std::string(model_id)); it != c.routing.end()) return it->second;
  if (auto it = c.routing.find("default"); it != c.routing.end()) return it->second;
  if (c.backends.size() == 1) return c.backends.front().name;
  config_error("routing", "no backend routed for model '" + std::string(model_id) + "'");
}

void validate(const RunConfig& c) {
  if (c.bank_path.empty()) config_error("run.bank", "no persona bank configured");
  if (!std::filesystem::exists(c.bank_path)) {
    config_error("run.bank", "persona bank " + c.bank_path.string() + " does not exist");
  }
  if (c.protagonists.empty()) config_error("models.protagonists", "no protagonist model");
  if (c.npc_model.empty()) config_error("models.npc", "no NPC model");
  if (c.environment_model.empty()) config_error("models.environment", "no environment model");
  if (c.judges.empty()) config_error("models.judges", "judge roster is empty");
  if (c.arbiter.empty()) config_error("models.arbiter", "no arbiter model");
  if (!(c.threshold > 0.0)) config_error("evaluation.threshold", "threshold must be positive");
  if (c.backends.empty()) config_error("backend", "no backend declared");
  std::set<std::string> names;
  for (const auto& b : c.backends) {
    if (!names.insert(b.name).second) config_error("backend." + b.name, "backend declared twice");
    validate(b);
  }
  std::vector<std::string> models = c.protagonists;
  models.insert(models.end(), c.judges.begin(), c.judges.end());
  models.push_back(c.npc_model);
  models.push_back(c.environment_model);
  models.push_back(c.arbiter);
  for (const auto& m : models) {
    const std::string b = backend_for(c, m);
    if (!names.contains(b)) config_error("routing", "model '" + m + "' routes to unknown backend '" + b + "'");
  }
  std::set<std::string> protagonist_slugs;
  for (const auto& m : c.protagonists) {
    if (!protagonist_slugs.insert(slugify(m)).second) {
      config_error("models.protagonists", "protagonist '" + m + "' listed twice");
    }
  }
  const std::string embedding = c.embedding_backend.empty() ? backend_for(c, c.protagonists.front())
                                                            : c.embedding_backend;
  if (!names.contains(embedding)) config_error("models.embedding", "unknown embedding backend '" + embedding + "'");
  validate(c.turn_control);
  validate(evaluation_config(c));
}

ModelBinding agent_binding(const RunConfig& c, std::string_view model_id) {
  return ModelBinding{std::string(model_id), backend_for(c, model_id), c.agent_temperature,
                      c.max_tokens};
}

ModelBinding judge_binding(const RunConfig& c, std::string_view model_id) {
  return ModelBinding{std::string(model_id), backend_for(c, model_id), c.judge_temperature,
                      c.max_tokens};
}

SimulationConfig simulation_config(const RunConfig& c, std::string_view protagonist_model) {
  SimulationConfig s;
  s.turn_control = c.turn_control;
  s.seed = c.seed;
  s.protagonist = agent_binding(c, protagonist_model);
  s.npc = agent_binding(c, c.npc_model);
  s.environment = agent_binding(c, c.environment_model);
  s.embedding_backend = c.embedding_backend.empty() ? s.protagonist.backend : c.embedding_backend;
  s.memory_k = c.memory_k;
  return s;
}

EvaluationConfig evaluation_config(const RunConfig& c) {
  EvaluationConfig e;
  for (const auto& j : c.judges) e.judges.push_back(judge_binding(c, j));
  e.referee = judge_binding(c, c.arbiter);
  e.threshold = c.threshold;
  e.concurrent_judges = c.concurrent_judges;
  return e;
}

void register_backends(Gateway& gateway, const RunConfig& c) {
  for (const auto& b : c.backends) gateway.add_backend(b);
}

json to_json(const RunConfig& c) {
  json backends = json::object();
  for (const auto& b : c.backends) {
    json j{{"kind", b.kind == BackendKind::kHttp ? "http" : "scripted"},
           {"max_attempts", b.max_attempts},
           {"max_concurrency", b.max_concurrency},
           {"requests_per_second", b.requests_per_second},
           {"timeout_s", b.timeout.count()},
           {"backoff_initial_ms", b.backoff.initial.count()},
           {"backoff_cap_ms", b.backoff.cap.count()},
           {"backoff_multiplier", b.backoff.multiplier},
           {"jitter", b.backoff.jitter},
           {"embedding_model", b.embedding_model},
           {"embedding_dim", b.embedding_dim}};
    if (b.kind == BackendKind::kHttp) {
      j["base_url"] = b.base_url;
      j["api_key_env"] = api_key_variable(b);
    }
    if (auto it = c.script_paths.find(b.name); it != c.script_paths.end()) {
      j["script"] = it->second.generic_string();
      j["script_sha256"] = sha256_hex(script_to_json(b.script).dump());
    }
    backends[b.name] = j;
  }
  return json{
      {"run",
       {{"bank", c.bank_path.generic_string()},
        {"sample", c.sample},
        {"seed", c.seed},
        {"repeats", c.repeats},
        {"parallelism", c.parallelism},
        {"out", c.out_dir.generic_string()},
        {"memory_k", c.memory_k}}},
      {"models",
       {{"protagonists", c.protagonists},
        {"npc", c.npc_model},
        {"environment", c.environment_model},
        {"judges", c.judges},
        {"arbiter", c.arbiter},
        {"embedding", c.embedding_backend},
        {"agent_temperature", c.agent_temperature},
        {"judge_temperature", c.judge_temperature},
        {"max_tokens", c.max_tokens}}},
      {"routing", c.routing},
      {"backends", backends},
      {"turn_control",
       {{"dim_quorum", c.turn_control.dim_quorum},
        {"stall_rounds", c.turn_control.stall_rounds},
        {"evidence_quorum", c.turn_control.evidence_quorum},
        {"max_turns", c.turn_control.max_turns},
        {"early_stop", c.turn_control.early_stop_enabled}}},
      {"evaluation", {{"threshold", c.threshold}, {"concurrent_judges", c.concurrent_judges}}},
      {"export", {{"sft_top_k", c.sft_top_k}, {"dpo_top_n", c.dpo_top_n}}}};
}

}  // namespace rolesim
