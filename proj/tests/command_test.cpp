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

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gear/command.hpp"
#include "gear/error.hpp"
#include "gear/simulation.hpp"
#include "gear/value.hpp"
#include "testing.hpp"

namespace gear {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;
using testing::WriteText;

nlohmann::json QuickSearch() {
  return {{"population_size", 200}, {"generations", 15}, {"polish_restarts", 2}};
}

struct Files {
  fs::path experimental;
  fs::path auxiliary;
};

Files WriteScenario(const TempDir& dir, ScenarioId id, Eigen::Index n,
                    std::uint64_t seed) {
  ScenarioSpec spec;
  spec.id = id;
  const Schema schema = DefaultSchema(spec.r(), spec.s());
  Files f{dir / "experimental.csv", dir / "auxiliary.csv"};
  WriteExperimental(f.experimental, GenerateExperimental(spec, n, seed), schema);
  WriteAuxiliary(f.auxiliary, GenerateAuxiliary(spec, n, seed + 1), schema);
  return f;
}

RunConfig FitConfig(const Files& f) {
  RunConfig config = RunConfig::FromJson(
      {{"command", "fit"},
       {"experimental", f.experimental.string()},
       {"auxiliary", f.auxiliary.string()},
       {"search", QuickSearch()},
       {"seed", 5}});
  config.ApplySeed();
  return config;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("config parsing and validation") {
  const RunConfig c = RunConfig::FromJson(
      {{"command", "simulate"},
       {"method", "gear-bspline"},
       {"ci_level", 0.9},
       {"aux_variance_weight", "ratio"},
       {"seed", 17},
       {"simulation", {{"scenario", "S5"}, {"reps", 3}, {"truth_mode", "plug_in"}}}});
  CHECK(c.command == Command::kSimulate);
  CHECK(c.analysis.method == Method::kGearBspline);
  CHECK(c.analysis.ci_level == 0.9);
  CHECK(c.analysis.aux_variance_weight == AuxVarianceWeight::kRatio);
  CHECK(c.seed == 17);
  CHECK(c.simulation.scenario == "S5");
  CHECK(c.simulation.truth_mode == TruthMode::kPlugIn);
  CHECK_NOTHROW(c.Validate());

  const RunConfig back = RunConfig::FromJson(c.ToJson());
  CHECK(back.ToJson() == c.ToJson());

  RunConfig bad = c;
  bad.simulation.reps = 0;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad = c;
  bad.simulation.scenario = "S9";
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad = c;
  bad.analysis.ci_level = 1.2;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  CHECK_THROWS_AS(RunConfig::FromJson({{"command", "dance"}}), Error);
  CHECK_THROWS_AS(RunConfig::FromJson({{"method", "forest"}}), Error);
}

TEST_CASE("relative data paths resolve against the config directory") {
  TempDir dir("cfg");
  WriteText(dir / "run.json",
            R"({"command": "fit", "experimental": "e.csv", "auxiliary": "u.csv"})");
  const RunConfig c = RunConfig::Load(dir / "run.json");
  CHECK(c.experimental == dir / "e.csv");
  CHECK(c.auxiliary == dir / "u.csv");
  WriteText(dir / "broken.json", "{\"command\": ");
  CHECK_THROWS_AS(RunConfig::Load(dir / "broken.json"), ConfigError);
}

TEST_CASE("missing data files are schema errors") {
  TempDir dir("missing");
  const Files f = WriteScenario(dir, ScenarioId::kS1, 60, 1);
  RunConfig config = FitConfig(f);
  config.auxiliary = dir / "nope.csv";
  CHECK_THROWS_AS(RunFit(config), SchemaError);
}

TEST_CASE("fit then evaluate reproduces the fitted value") {
  TempDir dir("fit");
  const Files f = WriteScenario(dir, ScenarioId::kS1, 300, 3);
  const RunConfig fit_config = FitConfig(f);
  const CommandResult fit = RunFit(fit_config);
  CHECK(fit.ok);
  const nlohmann::json& rule = fit.report.at("analysis").at("rule");
  const std::vector<double> beta = rule.at("beta").get<std::vector<double>>();
  CHECK(beta.size() == 5);
  CHECK(fit.report.at("seed") == 5);
  CHECK(fit.report.at("config").at("command") == "fit");
  CHECK(fit.report.at("schema").at("treatment") == "a");
  CHECK(fit.summary.find("value") != std::string::npos);

  RunConfig eval_config = fit_config;
  eval_config.command = Command::kEvaluate;
  eval_config.beta = beta;
  const CommandResult eval = RunEvaluate(eval_config);
  CHECK(eval.report.at("rule").at("value_aipw").get<double>() ==
        doctest::Approx(rule.at("value_aipw").get<double>()).epsilon(1e-12));

  std::vector<double> doubled = beta;
  for (double& b : doubled) b *= 2.0;
  eval_config.beta = doubled;
  const CommandResult eval2 = RunEvaluate(eval_config);
  CHECK(eval2.report.at("rule").at("value_aipw") ==
        eval.report.at("rule").at("value_aipw"));
  CHECK(eval2.report.at("rule").at("sigma") == eval.report.at("rule").at("sigma"));

  eval_config.beta.assign(5, 0.0);
  CHECK_THROWS_AS(RunEvaluate(eval_config), Error);
  eval_config.beta.assign(3, 1.0);
  CHECK_THROWS_AS(RunEvaluate(eval_config), DimensionError);
}

TEST_CASE("treat-all value matches the estimator with every decision set") {
  TempDir dir("all");
  const Files f = WriteScenario(dir, ScenarioId::kS2, 250, 9);
  const CommandResult fit = RunFit(FitConfig(f));
  const double reported =
      fit.report.at("analysis").at("value_treat_all").get<double>();

  const Schema schema = DefaultSchema(4, 2);
  const ExperimentalSample e = LoadExperimental(f.experimental, schema);
  const AuxiliarySample u = LoadAuxiliary(f.auxiliary, schema);
  const Nuisances fits = FitNuisances(e, u, AnalysisOptions{});
  const Eigen::MatrixXd phi = Expand(fits.propensity.basis, e.covariates()).values;
  const Eigen::VectorXd pi = fits.propensity.Probabilities(phi);
  const Eigen::VectorXd nu =
      Expand(fits.augmented.basis, e.covariates()).values * fits.augmented.theta1;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    sum += e.treatments()(i) * (fits.imputed(i) - nu(i)) / pi(i) + nu(i);
  }
  const double direct = sum / static_cast<double>(e.size());
  CHECK(reported == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("schema inference and explicit schema") {
  const CsvTable e = ParseCsv("age,x2,a,m1,m2\n1,2,0,3,4\n");
  const CsvTable u = ParseCsv("age,x2,m1,m2,y\n1,2,3,4,5\n");
  const Schema s = InferSchema(e, u);
  CHECK(s.covariates == std::vector<std::string>{"age", "x2"});
  CHECK(s.intermediates == std::vector<std::string>{"m1", "m2"});
  CHECK(s.treatment == "a");
  CHECK(s.outcome == "y");
  const CsvTable no_y = ParseCsv("age,x2,m1,m2\n1,2,3,4\n");
  CHECK_THROWS_AS(InferSchema(e, no_y), SchemaError);
}

// Trial-shaped data: 12 covariates (five continuous), two intermediates,
// 376 experimental rows of which 189 are treated.
TEST_CASE("trial-shaped data with an explicit schema and constant propensity") {
  TempDir dir("trial");
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::string> cov;
  for (int k = 0; k < 12; ++k) cov.push_back("c" + std::to_string(k + 1));
  auto header = [&](bool experimental) {
    std::string h;
    for (const auto& c : cov) h += c + ",";
    h += experimental ? "trt,cd4_20,cd8_20" : "cd4_20,cd8_20,cd4_96";
    return h + "\n";
  };
  auto covariates = [&](std::ostream& out, std::vector<double>& x) {
    x.assign(12, 0.0);
    for (int k = 0; k < 12; ++k) {
      x[static_cast<std::size_t>(k)] = k < 5 ? z(rng) : (coin(rng) ? 1.0 : 0.0);
      out << x[static_cast<std::size_t>(k)] << ",";
    }
  };
  std::ostringstream es, us;
  es << header(true);
  std::vector<int> arms(376, 0);
  for (int i = 0; i < 189; ++i) arms[static_cast<std::size_t>(i)] = 1;
  std::shuffle(arms.begin(), arms.end(), rng);
  std::vector<double> x;
  for (int i = 0; i < 376; ++i) {
    covariates(es, x);
    const int a = arms[static_cast<std::size_t>(i)];
    es << a << "," << x[0] + a * 0.5 + z(rng) << "," << x[1] - a * 0.3 + z(rng)
       << "\n";
  }
  us << header(false);
  for (int i = 0; i < 500; ++i) {
    covariates(us, x);
    const double m1 = x[0] + z(rng);
    const double m2 = x[1] + z(rng);
    us << m1 << "," << m2 << "," << 0.8 * m1 - 0.2 * m2 + 0.1 * x[2] + z(rng)
       << "\n";
  }
  WriteText(dir / "e.csv", es.str());
  WriteText(dir / "u.csv", us.str());

  Schema schema;
  schema.covariates = cov;
  schema.treatment = "trt";
  schema.intermediates = {"cd4_20", "cd8_20"};
  schema.outcome = "cd4_96";
  schema.continuous_covariates = {"c1", "c2", "c3", "c4", "c5"};

  nlohmann::json j = {{"command", "fit"},
                      {"experimental", "e.csv"},
                      {"auxiliary", "u.csv"},
                      {"propensity", "constant"},
                      {"schema", schema.ToJson()},
                      {"search", QuickSearch()}};
  RunConfig config = RunConfig::FromJson(j, dir.path());
  config.ApplySeed();
  CHECK(Schema::FromJson(schema.ToJson()).ToJson() == schema.ToJson());

  const CommandResult fit = RunFit(config);
  const nlohmann::json& analysis = fit.report.at("analysis");
  CHECK(analysis.at("nuisances").at("propensity").at("constant").get<double>() ==
        doctest::Approx(189.0 / 376.0));
  CHECK(analysis.at("rule").at("beta").size() == 13);
  CHECK(fit.report.at("schema").at("outcome") == "cd4_96");

  config.analysis.method = Method::kGearBspline;
  const CommandResult spline = RunFit(config);
  // Only the five continuous covariates get squared terms.
  CHECK(spline.report.at("analysis").at("rule").at("beta").size() == 18);
}

TEST_CASE("sensitivity command writes one row per level") {
  RunConfig config = RunConfig::FromJson(
      {{"command", "sensitivity"},
       {"search", QuickSearch()},
       {"simulation",
        {{"n_e", 100}, {"n_u", 100}, {"reps", 2}, {"truth_size", 5000}}}});
  config.ApplySeed();
  const CommandResult result = RunCommand(config);
  std::istringstream lines(result.csv);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) rows += !line.empty();
  CHECK(rows == 4);
  CHECK(result.report.at("reports").size() == 3);
}

#ifdef GEAR_CLI_PATH
int RunCli(const std::string& args, const fs::path& stdout_path) {
  const std::string cmd = std::string("\"") + GEAR_CLI_PATH + "\" " + args +
                          " > \"" + stdout_path.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_CASE("command-line tool exit codes and outputs") {
  TempDir dir("cli");
  const Files f = WriteScenario(dir, ScenarioId::kS1, 200, 4);
  WriteText(dir / "run.json",
            nlohmann::json{{"search", QuickSearch()},
                           {"experimental", f.experimental.string()},
                           {"auxiliary", f.auxiliary.string()}}
                .dump());
  const fs::path log = dir / "log.txt";
  const std::string cfg = "--config \"" + (dir / "run.json").string() + "\" ";

  CHECK(RunCli(cfg + "--command fit --out \"" + (dir / "fit.json").string() + "\"",
               log) == 0);
  const nlohmann::json report = nlohmann::json::parse(Slurp(dir / "fit.json"));
  CHECK(report.contains("config"));
  CHECK(report.at("analysis").at("rule").at("beta").size() == 5);

  CHECK(RunCli(cfg + "--command evaluate --beta 0,1,-1,-1,1", log) == 0);
  CHECK(Slurp(log).find("value_aipw") != std::string::npos);

  CHECK(RunCli(cfg + "--command simulate --scenario S1 --reps 2 --n-e 80 "
                     "--n-u 80 --out \"" + (dir / "sim.csv").string() + "\"",
               log) == 0);
  CHECK(Slurp(dir / "sim.csv").rfind("scenario,l,method", 0) == 0);
  CHECK(fs::exists(dir / "sim.csv.json"));

  CHECK(RunCli(cfg + "--command simulate --reps 0", log) == 2);
  CHECK(RunCli(cfg + "--command fit --auxiliary \"" +
                   (dir / "gone.csv").string() + "\"",
               log) == 2);
  CHECK(Slurp(log).find("schema error") != std::string::npos);

  WriteText(dir / "bad.csv", "x1,x2,x3,x4,a,m1,m2\n1,2,3,4,1,oops,2\n");
  CHECK(RunCli(cfg + "--command fit --experimental \"" +
                   (dir / "bad.csv").string() + "\"",
               log) == 2);
  CHECK(Slurp(log).find("parse error") != std::string::npos);
}
#endif

}  // namespace
}  // namespace gear
