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

#include "gear/command.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include "gear/error.hpp"
#include "gear/parallel.hpp"

namespace gear {

namespace fs = std::filesystem;

std::string CommandName(Command command) {
  switch (command) {
    case Command::kFit:
      return "fit";
    case Command::kEvaluate:
      return "evaluate";
    case Command::kSimulate:
      return "simulate";
    case Command::kSensitivity:
      return "sensitivity";
  }
  return "fit";
}

Command ParseCommand(const std::string& name) {
  if (name == "fit") return Command::kFit;
  if (name == "evaluate") return Command::kEvaluate;
  if (name == "simulate") return Command::kSimulate;
  if (name == "sensitivity") return Command::kSensitivity;
  throw ConfigError("unknown command '" + name +
                    "' (expected fit, evaluate, simulate, or sensitivity)");
}

nlohmann::json SimulationSettings::ToJson() const {
  return {{"scenario", scenario},
          {"n_e", n_e},
          {"n_u", n_u},
          {"reps", reps},
          {"noise_param", NoiseParamName(noise)},
          {"truth_mode", TruthModeName(truth_mode)},
          {"truth_size", truth_size},
          {"contamination_l", contamination_l},
          {"l_values", l_values}};
}

namespace {

fs::path Resolve(const nlohmann::json& j, const char* key,
                 const fs::path& base) {
  if (!j.contains(key)) return {};
  fs::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

SimulationSettings SimulationFromJson(const nlohmann::json& j) {
  SimulationSettings s;
  s.scenario = j.value("scenario", s.scenario);
  s.n_e = j.value("n_e", s.n_e);
  s.n_u = j.value("n_u", s.n_u);
  s.reps = j.value("reps", s.reps);
  if (j.contains("noise_param")) {
    s.noise = ParseNoiseParam(j.at("noise_param").get<std::string>());
  }
  if (j.contains("truth_mode")) {
    s.truth_mode = ParseTruthMode(j.at("truth_mode").get<std::string>());
  }
  s.truth_size = j.value("truth_size", s.truth_size);
  s.contamination_l = j.value("contamination_l", s.contamination_l);
  s.l_values = j.value("l_values", s.l_values);
  return s;
}

}  // namespace

RunConfig RunConfig::FromJson(const nlohmann::json& j, const fs::path& base) {
  RunConfig c;
  try {
    if (j.contains("command")) {
      c.command = ParseCommand(j.at("command").get<std::string>());
    }
    c.experimental = Resolve(j, "experimental", base);
    c.auxiliary = Resolve(j, "auxiliary", base);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("schema")) c.schema = Schema::FromJson(j.at("schema"));
    AnalysisOptions& a = c.analysis;
    if (j.contains("method")) {
      a.method = ParseMethod(j.at("method").get<std::string>());
    }
    if (j.contains("propensity")) {
      a.propensity =
          ParsePropensityMode(j.at("propensity").get<std::string>());
    }
    if (j.contains("search")) a.search = SearchConfig::FromJson(j.at("search"));
    a.ci_level = j.value("ci_level", a.ci_level);
    if (j.contains("aux_variance_weight")) {
      a.aux_variance_weight =
          ParseWeight(j.at("aux_variance_weight").get<std::string>());
    }
    a.bspline_degrees = j.value("bspline_degrees", a.bspline_degrees);
    a.bspline_knots = j.value("bspline_knots", a.bspline_knots);
    a.cv_folds = j.value("cv_folds", a.cv_folds);
    a.rule_degree = j.value("rule_degree", a.rule_degree);
    c.seed = j.value("seed", c.seed);
    c.beta = j.value("beta", c.beta);
    if (j.contains("simulation")) {
      c.simulation = SimulationFromJson(j.at("simulation"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.ApplySeed();
  return c;
}

RunConfig RunConfig::Load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() +
                      " is not valid JSON: " + e.what());
  }
  return FromJson(j, path.parent_path());
}

void RunConfig::ApplySeed() {
  analysis.search.seed = seed;
  analysis.cv_seed = DeriveSeed(seed, 0, 4);
}

void RunConfig::Validate() const {
  analysis.Validate();
  switch (command) {
    case Command::kFit:
    case Command::kEvaluate:
      if (experimental.empty() || auxiliary.empty()) {
        throw ConfigError(
            "fit and evaluate need both experimental and auxiliary paths");
      }
      if (!fs::exists(experimental)) {
        throw SchemaError("experimental file not found: " +
                          experimental.string());
      }
      if (!fs::exists(auxiliary)) {
        throw SchemaError("auxiliary file not found: " + auxiliary.string());
      }
      if (command == Command::kEvaluate && beta.empty()) {
        throw ConfigError("evaluate needs a beta vector");
      }
      break;
    case Command::kSimulate:
    case Command::kSensitivity: {
      ScenarioSpec::Parse(simulation.scenario);
      if (simulation.reps < 1) throw ConfigError("reps must be at least 1");
      if (simulation.n_e < 1 || simulation.n_u < 1) {
        throw ConfigError("sample sizes must be at least 1");
      }
      if (simulation.truth_size < 1) {
        throw ConfigError("truth_size must be at least 1");
      }
      if (command == Command::kSensitivity && simulation.l_values.empty()) {
        throw ConfigError("sensitivity needs at least one l value");
      }
      for (double l : simulation.l_values) {
        if (!(l >= 0.0 && l <= 1.0)) {
          throw ConfigError("l values must lie in [0, 1]");
        }
      }
      break;
    }
  }
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json j;
  j["command"] = CommandName(command);
  if (!experimental.empty()) j["experimental"] = experimental.string();
  if (!auxiliary.empty()) j["auxiliary"] = auxiliary.string();
  if (!output.empty()) j["output"] = output.string();
  if (schema) j["schema"] = schema->ToJson();
  const nlohmann::json a = analysis.ToJson();
  for (auto it = a.begin(); it != a.end(); ++it) j[it.key()] = it.value();
  j["seed"] = seed;
  if (!beta.empty()) j["beta"] = beta;
  j["simulation"] = simulation.ToJson();
  return j;
}

Schema InferSchema(const CsvTable& experimental, const CsvTable& auxiliary) {
  Schema schema;
  schema.treatment = "a";
  schema.outcome = "y";
  for (const auto& name : experimental.header) {
    if (name == "a" || name == "y") continue;
    if (!name.empty() && name[0] == 'm') {
      schema.intermediates.push_back(name);
    } else {
      schema.covariates.push_back(name);
    }
  }
  const std::set<std::string> aux(auxiliary.header.begin(),
                                  auxiliary.header.end());
  if (!aux.contains("y")) {
    throw SchemaError("auxiliary file has no 'y' column; supply a schema");
  }
  if (schema.intermediates.empty() || schema.covariates.empty()) {
    throw SchemaError(
        "cannot infer covariates and intermediates from the header; supply a "
        "schema");
  }
  return schema;
}

namespace {

struct LoadedData {
  Schema schema;
  ExperimentalSample experimental;
  AuxiliarySample auxiliary;
};

LoadedData LoadData(const RunConfig& config) {
  const CsvTable exp_table = ReadCsv(config.experimental);
  const CsvTable aux_table = ReadCsv(config.auxiliary);
  Schema schema = config.schema ? *config.schema
                                : InferSchema(exp_table, aux_table);
  ExperimentalSample experimental = ExperimentalFromTable(exp_table, schema);
  AuxiliarySample auxiliary = AuxiliaryFromTable(aux_table, schema);
  return {std::move(schema), std::move(experimental), std::move(auxiliary)};
}

AnalysisOptions ResolvedOptions(const RunConfig& config, const Schema& schema) {
  AnalysisOptions options = config.analysis;
  options.search.workers = DefaultWorkers();
  options.continuous_covariates = schema.ContinuousCovariateIndices();
  return options;
}

nlohmann::json BaseReport(const RunConfig& config) {
  nlohmann::json j;
  j["config"] = config.ToJson();
  j["seed"] = config.seed;
  return j;
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string RuleSummary(const RuleEvaluation& e) {
  std::ostringstream out;
  out << "beta:";
  for (Eigen::Index k = 0; k < e.rule.beta().size(); ++k) {
    out << ' ' << Fixed(e.rule.beta()(k));
  }
  out << "\nvalue (AIPW)   " << Fixed(e.value) << "\nvalue (IPW)    "
      << Fixed(e.ipw_value) << "\nsigma          " << Fixed(e.sigma)
      << "\n" << Fixed(100.0 * e.interval.level, 1) << "% CI       ["
      << Fixed(e.interval.lower) << ", " << Fixed(e.interval.upper) << "]"
      << "\nassigned       treated " << e.assigned_treated << ", control "
      << e.assigned_control << "\n";
  return out.str();
}

std::string TableSummary(const std::vector<ReplicationReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(5) << "scen" << std::setw(6) << "l"
      << std::setw(14) << "method" << std::setw(6) << "N_E" << std::setw(6)
      << "reps" << std::setw(8) << "V_hat" << std::setw(8) << "SE"
      << std::setw(8) << "E_sig" << std::setw(8) << "V(b)" << std::setw(8)
      << "CP%" << std::setw(8) << "RCD%" << "L2\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(5) << r.spec.name() << std::setw(6)
        << Fixed(r.spec.contamination_l, 1) << std::setw(14)
        << MethodName(r.method) << std::setw(6) << r.n_e << std::setw(6)
        << r.replications << std::setw(8) << Fixed(r.mean_value_hat, 3)
        << std::setw(8) << Fixed(r.se_value_hat, 3) << std::setw(8)
        << Fixed(r.mean_sigma_hat, 3) << std::setw(8)
        << Fixed(r.value_of_rule, 3) << std::setw(8)
        << Fixed(100.0 * r.coverage, 1) << std::setw(8)
        << Fixed(100.0 * r.rcd, 1) << Fixed(r.l2_loss, 3) << '\n';
  }
  return out.str();
}

ReplicationOptions SimulationOptions(const RunConfig& config) {
  ReplicationOptions options;
  options.analysis = config.analysis;
  options.truth_mode = config.simulation.truth_mode;
  options.truth_size = config.simulation.truth_size;
  options.workers = DefaultWorkers();
  return options;
}

}  // namespace

CommandResult RunFit(const RunConfig& config) {
  config.Validate();
  const LoadedData data = LoadData(config);
  const Analysis analysis = RunAnalysis(
      data.experimental, data.auxiliary, ResolvedOptions(config, data.schema));
  CommandResult result;
  result.report = BaseReport(config);
  result.report["schema"] = data.schema.ToJson();
  result.report["analysis"] = ToJson(analysis);
  result.ok = !analysis.fatal;
  std::ostringstream out;
  out << RuleSummary(analysis.evaluation) << "value d=0      "
      << Fixed(analysis.value_treat_none) << "\nvalue d=1      "
      << Fixed(analysis.value_treat_all) << "\nflags         ";
  for (const auto& f : analysis.flags) out << ' ' << f;
  out << '\n';
  result.summary = out.str();
  return result;
}

CommandResult RunEvaluate(const RunConfig& config) {
  config.Validate();
  const LoadedData data = LoadData(config);
  const AnalysisOptions options = ResolvedOptions(config, data.schema);
  const Nuisances nuisances =
      FitNuisances(data.experimental, data.auxiliary, options);
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(
      config.beta.data(), static_cast<Eigen::Index>(config.beta.size()));
  const DecisionRule rule(beta, nuisances.rule_basis);
  const RuleEvaluation evaluation =
      EvaluateRule(data.experimental, data.auxiliary, nuisances, rule, options);
  bool fatal = false;
  CommandResult result;
  result.report = BaseReport(config);
  result.report["schema"] = data.schema.ToJson();
  result.report["rule"] = ToJson(evaluation);
  result.report["nuisances"] = ToJson(nuisances);
  result.report["flags"] = CollectFlags(nuisances, evaluation, nullptr, &fatal);
  result.report["fatal"] = fatal;
  result.ok = !fatal;
  result.summary = RuleSummary(evaluation);
  return result;
}

namespace {

CommandResult FromReports(const RunConfig& config,
                          const std::vector<ReplicationReport>& reports) {
  CommandResult result;
  result.report = BaseReport(config);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reports) list.push_back(ToJson(r));
  result.report["reports"] = std::move(list);
  std::ostringstream csv;
  csv << std::setprecision(10);
  WriteReportsCsv(csv, reports);
  result.csv = csv.str();
  result.summary = TableSummary(reports);
  return result;
}

}  // namespace

CommandResult RunSimulate(const RunConfig& config) {
  config.Validate();
  ScenarioSpec spec = ScenarioSpec::Parse(config.simulation.scenario);
  spec.noise = config.simulation.noise;
  spec.contamination_l = config.simulation.contamination_l;
  const ReplicationReport report = RunReplications(
      spec, config.simulation.n_e, config.simulation.n_u,
      config.simulation.reps, SimulationOptions(config), config.seed);
  return FromReports(config, {report});
}

CommandResult RunSensitivity(const RunConfig& config) {
  config.Validate();
  const auto reports = SensitivitySweep(
      config.simulation.l_values, config.simulation.n_e, config.simulation.n_u,
      config.simulation.reps, SimulationOptions(config), config.seed,
      config.simulation.noise);
  return FromReports(config, reports);
}

CommandResult RunCommand(const RunConfig& config) {
  switch (config.command) {
    case Command::kFit:
      return RunFit(config);
    case Command::kEvaluate:
      return RunEvaluate(config);
    case Command::kSimulate:
      return RunSimulate(config);
    case Command::kSensitivity:
      return RunSensitivity(config);
  }
  throw ConfigError("unknown command");
}

}  // namespace gear
