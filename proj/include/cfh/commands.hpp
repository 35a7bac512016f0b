// Copyright 2026 The cfh Authors. All Rights Reserved.
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

#ifndef CFH_COMMANDS_HPP
#define CFH_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfh/fixtures.hpp"
#include "cfh/model_config.hpp"
#include "cfh/trainer.hpp"

namespace cfh {

/// Everything a command needs. Loaded from a JSON document (--config) and then
/// overridden by command-line flags.
struct RunConfig {
  ModelConfig model = ModelConfig::toy();
  TrainConfig train;
  FixtureConfig fixtures;
  double tau = 0.5;
  std::optional<std::string> lexicon;
  std::optional<std::string> train_manifest;
  std::optional<std::string> eval_manifest;
  std::vector<std::string> noise_manifests;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::string> checkpoint;
  std::vector<std::string> inputs;
  double gradcheck_tolerance = 1e-4;
  int gradcheck_samples = 200;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

// Each command returns its process exit code and reports problems on `err`.
int cmd_make_fixtures(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err);
/// Exit 2 if any input is saveme/helpme, 1 if any input failed, else 0.
int cmd_detect(const RunConfig& c, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Parses `cfh <command> [flags]` and dispatches.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cfh

#endif  // CFH_COMMANDS_HPP
