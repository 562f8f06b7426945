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
// End-to-end analysis: fit the nuisances, search the rule, and attach the
// influence-function confidence interval.

#ifndef GEAR_PIPELINE_HPP_
#define GEAR_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gear/basis.hpp"
#include "gear/data.hpp"
#include "gear/inference.hpp"
#include "gear/nuisance.hpp"
#include "gear/search.hpp"
#include "gear/value.hpp"
#include "json.hpp"

namespace gear {

enum class Method {
  kGearLinear,   // identity bases for the outcome mean and the rule
  kGearBspline,  // CV-selected spline outcome mean, quadratic rule basis
};

std::string MethodName(Method method);
Method ParseMethod(const std::string& name);
std::string WeightName(AuxVarianceWeight weight);
AuxVarianceWeight ParseWeight(const std::string& name);
std::string PropensityModeName(PropensityMode mode);
PropensityMode ParsePropensityMode(const std::string& name);

struct AnalysisOptions {
  Method method = Method::kGearLinear;
  PropensityMode propensity = PropensityMode::kLogistic;
  SearchConfig search;
  double ci_level = 0.95;
  AuxVarianceWeight aux_variance_weight = AuxVarianceWeight::kSqrtRatio;
  // Covariate indices that get nonlinear expansions; empty means all.
  std::vector<int> continuous_covariates;
  // Spline candidate grid for the outcome mean (gear-bspline).
  std::vector<int> bspline_degrees{1, 2, 3};
  std::vector<int> bspline_knots{0, 1};
  int cv_folds = 5;
  std::uint64_t cv_seed = 7;
  int rule_degree = 2;
  // Explicit bases override the method's choice.
  std::optional<BasisSpec> rule_basis;
  std::optional<BasisSpec> outcome_basis;

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct Nuisances {
  BasisSpec rule_basis;
  BasisSpec outcome_basis;
  std::optional<BsplineSelection> selection;
  PropensityFit propensity;
  OutcomeMeanFit outcome_mean;
  Eigen::VectorXd imputed;
  AugmentedFit augmented;
};

// Result of evaluating one rule on fitted nuisances.
struct RuleEvaluation {
  DecisionRule rule;
  double value = 0.0;      // AIPW
  double ipw_value = 0.0;  // IPW, for comparison
  double sigma = 0.0;
  double sigma_ratio_weight = 0.0;
  ConfidenceInterval interval;
  Eigen::Index assigned_treated = 0;
  Eigen::Index assigned_control = 0;
  bool pseudo_inverse_used = false;
};

struct Analysis {
  Nuisances nuisances;
  SearchResult search;
  RuleEvaluation evaluation;
  // AIPW values of the constant rules d = 0 and d = 1.
  double value_treat_none = 0.0;
  double value_treat_all = 0.0;
  std::vector<std::string> flags;
  bool fatal = false;
};

Nuisances FitNuisances(const ExperimentalSample& experimental,
                       const AuxiliarySample& auxiliary,
                       const AnalysisOptions& options);

RuleEvaluation EvaluateRule(const ExperimentalSample& experimental,
                            const AuxiliarySample& auxiliary,
                            const Nuisances& nuisances,
                            const DecisionRule& rule,
                            const AnalysisOptions& options);

// AIPW value of the rule that assigns `action` to everyone.
double ConstantRuleValue(const ExperimentalSample& experimental,
                         const Nuisances& nuisances, bool action);

// Diagnostic flags; `fatal` is set for separation, a degenerate objective,
// or a non-finite value or sigma.
std::vector<std::string> CollectFlags(const Nuisances& nuisances,
                                      const RuleEvaluation& evaluation,
                                      const SearchResult* search, bool* fatal);

Analysis RunAnalysis(const ExperimentalSample& experimental,
                     const AuxiliarySample& auxiliary,
                     const AnalysisOptions& options);

nlohmann::json ToJson(const Nuisances& nuisances);
nlohmann::json ToJson(const RuleEvaluation& evaluation);
nlohmann::json ToJson(const Analysis& analysis);

}  // namespace gear

#endif  // GEAR_PIPELINE_HPP_
