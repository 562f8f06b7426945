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
// Scenario generators, ground-truth values, and replication studies.

#ifndef GEAR_SIMULATION_HPP_
#define GEAR_SIMULATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gear/basis.hpp"
#include "gear/data.hpp"
#include "gear/pipeline.hpp"
#include "gear/value.hpp"
#include "json.hpp"

namespace gear {

enum class ScenarioId { kS1 = 1, kS2, kS3, kS4, kS5, kS6 };

// How the scale 0.5 of the Gaussian errors is read.
enum class NoiseParam { kVariance, kSd };

// kStochastic averages realized outcomes, errors included. kPlugIn evaluates
// the noise-free structural model at the assigned action.
enum class TruthMode { kStochastic, kPlugIn };

std::string NoiseParamName(NoiseParam noise);
NoiseParam ParseNoiseParam(const std::string& name);
std::string TruthModeName(TruthMode mode);
TruthMode ParseTruthMode(const std::string& name);

struct ScenarioSpec {
  ScenarioId id = ScenarioId::kS1;
  double contamination_l = 1.0;  // S6 only; 1 means fully collected
  NoiseParam noise = NoiseParam::kVariance;
  bool noiseless = false;        // zero errors, for structural tests

  int r() const { return id == ScenarioId::kS6 ? 2 : 4; }
  int s() const { return 2; }
  double noise_sd() const;
  std::string name() const;
  void Validate() const;

  static ScenarioSpec Parse(const std::string& name);
  nlohmann::json ToJson() const;
};

// Noise-free structural pieces, evaluated at one covariate row.
Eigen::Vector2d IntermediateBaseline(const ScenarioSpec& spec,
                                     const double* x);
Eigen::Vector2d IntermediateEffect(const ScenarioSpec& spec, const double* x);
double OutcomeBaseline(const ScenarioSpec& spec, const double* x);
double OutcomeEffect(const ScenarioSpec& spec, const double* x,
                     const Eigen::Vector2d& m);

// E[Y | X = x, A = a]. kStochastic adds the contribution of the
// intermediate errors passed through a nonlinear outcome.
double ConditionalOutcomeMean(const ScenarioSpec& spec, const double* x,
                              int action, TruthMode mode);

// Conditional treatment effect of x; the sign defines the optimal rule.
double TreatmentEffect(const ScenarioSpec& spec, const double* x);

Eigen::MatrixXd DrawCovariates(const ScenarioSpec& spec, Eigen::Index n,
                               std::uint64_t seed);

// Intermediates as recorded (contaminated for S6 when l < 1) for given
// covariates and actions, plus the uncontaminated version.
struct IntermediateDraw {
  Eigen::MatrixXd recorded;
  Eigen::MatrixXd actual;
};
IntermediateDraw DrawIntermediates(const ScenarioSpec& spec,
                                   const Eigen::MatrixXd& covariates,
                                   const Eigen::VectorXd& actions,
                                   std::uint64_t seed);

ExperimentalSample GenerateExperimental(const ScenarioSpec& spec,
                                        Eigen::Index n, std::uint64_t seed);
AuxiliarySample GenerateAuxiliary(const ScenarioSpec& spec, Eigen::Index n,
                                  std::uint64_t seed);

// A policy is either a rule or the oracle 1{treatment effect > 0}.
class Policy {
 public:
  static Policy Rule(DecisionRule rule);
  static Policy Optimal();
  bool is_optimal() const { return !rule_.has_value(); }
  const DecisionRule& rule() const { return *rule_; }
  Decisions Decide(const ScenarioSpec& spec,
                   const Eigen::MatrixXd& covariates) const;

 private:
  std::optional<DecisionRule> rule_;
};

inline constexpr Eigen::Index kDefaultTruthSize = 1000000;

// Monte Carlo value of a policy: fresh rows, A = d(X), outcomes generated
// through the model (noise-free under kPlugIn); returns mean(Y).
double TrueValue(const ScenarioSpec& spec, const Policy& policy,
                 Eigen::Index mc_size, std::uint64_t seed,
                 TruthMode mode = TruthMode::kStochastic);

struct TruthSpec {
  Policy reference = Policy::Optimal();
  std::optional<Eigen::VectorXd> beta0;  // set when the reference is linear
  double true_value = 0.0;
  Eigen::Index mc_size = kDefaultTruthSize;
  TruthMode mode = TruthMode::kStochastic;
};

// Linear optimal coefficients for S1-S3 and S6; empty for S4 and S5.
std::optional<Eigen::VectorXd> ReferenceBeta(const ScenarioSpec& spec);
TruthSpec MakeTruth(const ScenarioSpec& spec, Eigen::Index mc_size,
                    std::uint64_t seed, TruthMode mode);

// Fraction of fresh covariate draws where the rule agrees with the reference.
double RateCorrectDecision(const ScenarioSpec& spec, const DecisionRule& rule,
                           const TruthSpec& truth, Eigen::Index mc_size,
                           std::uint64_t seed);

// Fixed covariate draws with per-row conditional means, for evaluating many
// rules quickly on common random numbers.
class TruthTable {
 public:
  TruthTable(const ScenarioSpec& spec, const BasisSpec& rule_basis,
             const Policy& reference, Eigen::Index size, std::uint64_t seed,
             TruthMode mode);
  double Value(const DecisionRule& rule) const;
  double ReferenceValue() const { return reference_value_; }
  double RateCorrectDecision(const DecisionRule& rule) const;
  Eigen::Index size() const { return basis_.rows(); }

 private:
  BasisSpec rule_basis_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd effect_;     // E[Y|x,1] - E[Y|x,0]
  Eigen::VectorXd agreement_;  // 2 * ref - 1
  double base_mean_ = 0.0;     // mean E[Y|x,0]
  double reference_treated_ = 0.0;
  double reference_value_ = 0.0;
};

struct ReplicationOptions {
  AnalysisOptions analysis;
  TruthMode truth_mode = TruthMode::kStochastic;
  Eigen::Index truth_size = kDefaultTruthSize;
  int workers = 1;
};

struct ReplicationRecord {
  bool ok = false;
  std::string failure;
  double value_hat = 0.0;
  double sigma_hat = 0.0;
  double sigma_hat_alternate = 0.0;
  bool covered = false;
  bool covered_alternate = false;
  double value_of_rule = 0.0;
  double rcd = 0.0;
  double l2_loss = 0.0;
  Eigen::VectorXd beta;
};

struct ReplicationReport {
  ScenarioSpec spec;
  Method method = Method::kGearLinear;
  Eigen::Index n_e = 0;
  Eigen::Index n_u = 0;
  double true_value = 0.0;
  double mean_value_hat = 0.0;
  double se_value_hat = 0.0;
  double mean_sigma_hat = 0.0;         // mean sigma / sqrt(N_E)
  double mean_sigma_raw = 0.0;         // mean sigma
  double mean_sigma_hat_alternate = 0.0;
  double value_of_rule = 0.0;
  double coverage = 0.0;
  double coverage_alternate = 0.0;
  double rcd = 0.0;
  double l2_loss = 0.0;
  double median_l2_loss = 0.0;
  int replications = 0;
  int excluded = 0;
  std::vector<ReplicationRecord> records;
};

// Seeds for replication `rep`: experimental, auxiliary, search, CV.
struct ReplicationSeeds {
  std::uint64_t experimental;
  std::uint64_t auxiliary;
  std::uint64_t search;
  std::uint64_t cv;
};
ReplicationSeeds SeedsFor(std::uint64_t seed, int rep);

ReplicationRecord RunReplication(const ScenarioSpec& spec, Eigen::Index n_e,
                                 Eigen::Index n_u, int rep,
                                 const ReplicationOptions& options,
                                 const TruthTable& truth,
                                 const std::optional<Eigen::VectorXd>& beta0,
                                 std::uint64_t seed);

ReplicationReport RunReplications(const ScenarioSpec& spec, Eigen::Index n_e,
                                  Eigen::Index n_u, int reps,
                                  const ReplicationOptions& options,
                                  std::uint64_t seed);

// Aggregates records; excluded (failed) records are counted, not averaged.
ReplicationReport Aggregate(const ScenarioSpec& spec, Method method,
                            Eigen::Index n_e, Eigen::Index n_u,
                            double true_value,
                            std::vector<ReplicationRecord> records);

// S6 for each l, ordered by l.
std::vector<ReplicationReport> SensitivitySweep(std::vector<double> l_values,
                                                Eigen::Index n_e,
                                                Eigen::Index n_u, int reps,
                                                const ReplicationOptions& options,
                                                std::uint64_t seed,
                                                NoiseParam noise =
                                                    NoiseParam::kVariance);

void WriteReportsCsv(std::ostream& out,
                     const std::vector<ReplicationReport>& reports);
nlohmann::json ToJson(const ReplicationReport& report);

}  // namespace gear

#endif  // GEAR_SIMULATION_HPP_
