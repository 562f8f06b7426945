/*
* Copyright 2026 The GEAR Authors.
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     https://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
* ============================================================================
*/
// Run configuration and the four workflows behind the command-line tool.

#ifndef GEAR_COMMAND_HPP_
#define GEAR_COMMAND_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gear/data.hpp"
#include "gear/pipeline.hpp"
#include "gear/simulation.hpp"
#include "json.hpp"

namespace gear {

enum class Command { kFit, kEvaluate, kSimulate, kSensitivity };

std::string CommandName(Command command);
Command ParseCommand(const std::string& name);

struct SimulationSettings {
  std::string scenario = "S1";
  Eigen::Index n_e = 400;
  Eigen::Index n_u = 400;
  int reps = 200;
  NoiseParam noise = NoiseParam::kVariance;
  TruthMode truth_mode = TruthMode::kStochastic;
  Eigen::Index truth_size = kDefaultTruthSize;
  double contamination_l = 1.0;
  std::vector<double> l_values{0.0, 0.4, 0.8};

  nlohmann::json ToJson() const;
};

struct RunConfig {
  Command command = Command::kFit;
  std::filesystem::path experimental;
  std::filesystem::path auxiliary;
  std::filesystem::path output;
  std::optional<Schema> schema;  // inferred from the headers when absent
  AnalysisOptions analysis;
  std::uint64_t seed = 1;
  std::vector<double> beta;  // evaluate only
  SimulationSettings simulation;

  // Relative data paths resolve against `base_dir`.
  static RunConfig FromJson(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = {});
  static RunConfig Load(const std::filesystem::path& path);
  // Seeds the search and cross-validation from `seed`.
  void ApplySeed();
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Schema from column names: treatment "a", outcome "y", intermediates
// prefixed "m", every other experimental column a covariate.
Schema InferSchema(const CsvTable& experimental, const CsvTable& auxiliary);

struct CommandResult {
  nlohmann::json report;  // always embeds the resolved config
  std::string csv;        // simulate and sensitivity
  std::string summary;    // human-readable table
  bool ok = true;         // false on fatal flags
};

CommandResult RunFit(const RunConfig& config);
CommandResult RunEvaluate(const RunConfig& config);
CommandResult RunSimulate(const RunConfig& config);
CommandResult RunSensitivity(const RunConfig& config);
CommandResult RunCommand(const RunConfig& config);

}  // namespace gear

#endif  // GEAR_COMMAND_HPP_
