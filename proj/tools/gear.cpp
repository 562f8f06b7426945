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

// gear: fit, evaluate, simulate, and sensitivity workflows.
//
//   gear --config run.json
//   gear --command simulate --scenario S1 --reps 50 --out s1.csv
//   gear --command evaluate --experimental e.csv --auxiliary u.csv \
//        --beta 0,1,-1,-1,1

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gear/command.hpp"
#include "gear/error.hpp"

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw gear::ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal decision rules from experimental and auxiliary samples"};
  std::string config_path;
  std::optional<std::string> command, scenario, method, out, weight,
      experimental, auxiliary, truth_mode, noise_param;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<long> n_e, n_u;
  std::optional<double> ci_level, l_value;
  std::vector<double> beta, l_values;

  app.add_option("--config", config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--command", command, "fit | evaluate | simulate | sensitivity");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--reps", reps, "replications for simulate/sensitivity");
  app.add_option("--scenario", scenario, "S1..S6");
  app.add_option("--method", method, "gear-linear | gear-bspline");
  app.add_option("--ci-level", ci_level, "confidence level in (0,1)");
  app.add_option("--out", out, "output file (JSON report or CSV table)");
  app.add_option("--aux-variance-weight", weight, "sqrt_ratio | ratio");
  app.add_option("--experimental", experimental, "experimental CSV");
  app.add_option("--auxiliary", auxiliary, "auxiliary CSV");
  app.add_option("--beta", beta, "rule coefficients for evaluate")
      ->delimiter(',');
  app.add_option("--n-e", n_e, "simulated experimental size");
  app.add_option("--n-u", n_u, "simulated auxiliary size");
  app.add_option("--l", l_value, "S6 contamination level for simulate");
  app.add_option("--l-values", l_values, "contamination levels for sensitivity")
      ->delimiter(',');
  app.add_option("--truth-mode", truth_mode, "stochastic | plug_in");
  app.add_option("--noise-param", noise_param, "variance | sd");
  CLI11_PARSE(app, argc, argv);

  try {
    gear::RunConfig config = config_path.empty()
                                 ? gear::RunConfig::FromJson(nlohmann::json::object())
                                 : gear::RunConfig::Load(config_path);
    if (command) config.command = gear::ParseCommand(*command);
    if (seed) config.seed = *seed;
    if (reps) config.simulation.reps = *reps;
    if (scenario) config.simulation.scenario = *scenario;
    if (method) config.analysis.method = gear::ParseMethod(*method);
    if (ci_level) config.analysis.ci_level = *ci_level;
    if (out) config.output = *out;
    if (weight) config.analysis.aux_variance_weight = gear::ParseWeight(*weight);
    if (experimental) config.experimental = *experimental;
    if (auxiliary) config.auxiliary = *auxiliary;
    if (!beta.empty()) config.beta = beta;
    if (n_e) config.simulation.n_e = *n_e;
    if (n_u) config.simulation.n_u = *n_u;
    if (l_value) config.simulation.contamination_l = *l_value;
    if (!l_values.empty()) config.simulation.l_values = l_values;
    if (truth_mode) config.simulation.truth_mode = gear::ParseTruthMode(*truth_mode);
    if (noise_param) config.simulation.noise = gear::ParseNoiseParam(*noise_param);
    config.ApplySeed();

    const gear::CommandResult result = gear::RunCommand(config);
    std::cout << result.summary;
    const bool tabular = config.command == gear::Command::kSimulate ||
                         config.command == gear::Command::kSensitivity;
    if (!config.output.empty()) {
      if (tabular) {
        WriteFile(config.output, result.csv);
        WriteFile(config.output.string() + ".json", result.report.dump(2) + "\n");
      } else {
        WriteFile(config.output, result.report.dump(2) + "\n");
      }
    } else if (tabular) {
      std::cout << result.csv;
    } else {
      std::cout << result.report.dump(2) << '\n';
    }
    if (!result.ok) {
      std::cerr << "gear: fatal diagnostic flags raised; see report\n";
      return 1;
    }
  } catch (const gear::ParseError& e) {
    std::cerr << "gear: parse error: " << e.what() << '\n';
    return 2;
  } catch (const gear::SchemaError& e) {
    std::cerr << "gear: schema error: " << e.what() << '\n';
    return 2;
  } catch (const gear::Error& e) {
    std::cerr << "gear: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
