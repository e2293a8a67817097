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

// Writes a replay script covering every persona in a bank, for running the
// pipeline offline with a scripted backend.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rolesim/error.hpp"
#include "rolesim/persona_bank.hpp"
#include "rolesim/scripted_corpus.hpp"
#include "rolesim/text.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a scripted-backend replay script for a persona bank"};
  std::string bank_path, out_path;
  rolesim::corpus::Options options;
  bool no_transient = false;
  app.add_option("--bank", bank_path, "Persona bank (JSONL)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Script file to write")->required();
  app.add_option("--protagonists", options.protagonists, "Protagonist model ids")->delimiter(',')->capture_default_str();
  app.add_option("--judges", options.judges, "Judge model ids")->delimiter(',')->capture_default_str();
  app.add_option("--repeats", options.repeats, "Repeats per persona and model")->capture_default_str();
  app.add_option("--max-turns", options.max_turns, "Rounds scripted per episode")->capture_default_str();
  app.add_option("--quorum-round", options.quorum_round, "Round reaching the coverage quorum (4 or 5)")
      ->check(CLI::IsMember({4, 5}))
      ->capture_default_str();
  app.add_flag("--no-transient", no_transient, "Do not inject the transient failure");
  CLI11_PARSE(app, argc, argv);
  options.inject_transient = !no_transient;

  try {
    const auto bank = rolesim::load_bank(bank_path);
    const auto script = rolesim::corpus::build_script(bank.personas(), options);
    rolesim::write_file(out_path, rolesim::script_to_json(script).dump(1) + "\n");
    std::cerr << "wrote " << script.size() << " script keys for " << bank.size() << " personas to "
              << out_path << "\n";
    return 0;
  } catch (const rolesim::Error& e) {
    std::cerr << "error: " << rolesim::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}
