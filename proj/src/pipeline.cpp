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

#include "gear/pipeline.hpp"

#include <cmath>
#include <utility>

#include "gear/error.hpp"

namespace gear {

std::string MethodName(Method method) {
  return method == Method::kGearLinear ? "gear-linear" : "gear-bspline";
}

Method ParseMethod(const std::string& name) {
  if (name == "gear-linear" || name == "linear") return Method::kGearLinear;
  if (name == "gear-bspline" || name == "bspline") return Method::kGearBspline;
  throw ConfigError("unknown method '" + name +
                    "' (expected gear-linear or gear-bspline)");
}

std::string WeightName(AuxVarianceWeight weight) {
  return weight == AuxVarianceWeight::kSqrtRatio ? "sqrt_ratio" : "ratio";
}

AuxVarianceWeight ParseWeight(const std::string& name) {
  if (name == "sqrt_ratio") return AuxVarianceWeight::kSqrtRatio;
  if (name == "ratio") return AuxVarianceWeight::kRatio;
  throw ConfigError("unknown auxiliary variance weight '" + name +
                    "' (expected sqrt_ratio or ratio)");
}

std::string PropensityModeName(PropensityMode mode) {
  return mode == PropensityMode::kConstant ? "constant" : "logistic";
}

PropensityMode ParsePropensityMode(const std::string& name) {
  if (name == "constant") return PropensityMode::kConstant;
  if (name == "logistic") return PropensityMode::kLogistic;
  throw ConfigError("unknown propensity mode '" + name +
                    "' (expected constant or logistic)");
}

void AnalysisOptions::Validate() const {
  search.Validate();
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw ConfigError("ci_level must lie in (0, 1)");
  }
  if (cv_folds < 2) throw ConfigError("cv_folds must be at least 2");
  if (rule_degree < 1) throw ConfigError("rule_degree must be at least 1");
  if (bspline_degrees.empty() || bspline_knots.empty()) {
    throw ConfigError("spline candidate grid is empty");
  }
  for (int d : bspline_degrees) {
    if (d < 0) throw ConfigError("spline degree must be non-negative");
  }
  for (int k : bspline_knots) {
    if (k < 0) throw ConfigError("knot count must be non-negative");
  }
}

nlohmann::json AnalysisOptions::ToJson() const {
  nlohmann::json j;
  j["method"] = MethodName(method);
  j["propensity"] = PropensityModeName(propensity);
  j["search"] = search.ToJson();
  j["ci_level"] = ci_level;
  j["aux_variance_weight"] = WeightName(aux_variance_weight);
  j["continuous_covariates"] = continuous_covariates;
  j["bspline_degrees"] = bspline_degrees;
  j["bspline_knots"] = bspline_knots;
  j["cv_folds"] = cv_folds;
  j["cv_seed"] = cv_seed;
  j["rule_degree"] = rule_degree;
  if (rule_basis) j["rule_basis"] = rule_basis->ToJson();
  if (outcome_basis) j["outcome_basis"] = outcome_basis->ToJson();
  return j;
}

namespace {

// Continuous covariate indices lifted into the joint [X | M] layout, where
// every intermediate is treated as continuous.
std::vector<int> JointContinuous(const std::vector<int>& covariates,
                                 int r, int s) {
  std::vector<int> dims;
  if (covariates.empty()) {
    for (int k = 0; k < r; ++k) dims.push_back(k);
  } else {
    dims = covariates;
  }
  for (int k = 0; k < s; ++k) dims.push_back(r + k);
  return dims;
}

}  // namespace

Nuisances FitNuisances(const ExperimentalSample& experimental,
                       const AuxiliarySample& auxiliary,
                       const AnalysisOptions& options) {
  options.Validate();
  CheckCompatible(experimental, auxiliary);
  const int r = static_cast<int>(experimental.covariate_dim());
  const int s = static_cast<int>(experimental.intermediate_dim());

  std::optional<BsplineSelection> selection;
  BasisSpec outcome_basis;
  if (options.outcome_basis) {
    outcome_basis = *options.outcome_basis;
  } else if (options.method == Method::kGearLinear) {
    outcome_basis = BasisSpec::Identity(r + s);
  } else {
    selection = SelectBsplineSpec(
        auxiliary, options.bspline_degrees, options.bspline_knots,
        options.cv_folds, options.cv_seed,
        JointContinuous(options.continuous_covariates, r, s));
    outcome_basis = selection->spec;
  }
  if (outcome_basis.input_dim != r + s) {
    throw DimensionError("outcome basis expects " +
                         std::to_string(outcome_basis.input_dim) +
                         " inputs, joint data has " + std::to_string(r + s));
  }

  BasisSpec rule_basis;
  if (options.rule_basis) {
    rule_basis = *options.rule_basis;
  } else if (options.method == Method::kGearLinear) {
    rule_basis = BasisSpec::Identity(r);
  } else {
    rule_basis = BasisSpec::Polynomial(r, options.rule_degree,
                                       options.continuous_covariates);
  }
  if (rule_basis.input_dim != r) {
    throw DimensionError("rule basis expects " +
                         std::to_string(rule_basis.input_dim) +
                         " covariates, data has " + std::to_string(r));
  }

  PropensityFit propensity =
      FitPropensity(experimental, BasisSpec::Identity(r), options.propensity);
  OutcomeMeanFit outcome_mean = FitOutcomeMean(auxiliary, outcome_basis);
  Eigen::VectorXd imputed = ImputeOutcomes(outcome_mean, experimental);
  AugmentedFit augmented = FitAugmented(experimental, imputed, rule_basis);
  return Nuisances{std::move(rule_basis), std::move(outcome_basis),
                   std::move(selection), std::move(propensity),
                   std::move(outcome_mean), std::move(imputed),
                   std::move(augmented)};
}

RuleEvaluation EvaluateRule(const ExperimentalSample& experimental,
                            const AuxiliarySample& auxiliary,
                            const Nuisances& nuisances,
                            const DecisionRule& rule,
                            const AnalysisOptions& options) {
  if (!(rule.basis() == nuisances.rule_basis)) {
    throw DimensionError("rule basis differs from the fitted rule basis");
  }
  const InfluenceComponents components =
      ComputeComponents(rule, experimental, auxiliary, nuisances.propensity,
                        nuisances.outcome_mean, nuisances.augmented);
  const SampleRatio ratio = ComputeSampleRatio(experimental, auxiliary);
  RuleEvaluation out{rule, 0.0, 0.0, 0.0, 0.0, {}, 0, 0, false};
  out.value = components.value;
  out.ipw_value = IpwValue(rule, experimental, nuisances.imputed,
                           nuisances.propensity)
                      .value;
  out.sigma =
      EstimateSigma(components, ratio, options.aux_variance_weight);
  out.sigma_ratio_weight =
      EstimateSigma(components, ratio,
                    options.aux_variance_weight == AuxVarianceWeight::kSqrtRatio
                        ? AuxVarianceWeight::kRatio
                        : AuxVarianceWeight::kSqrtRatio);
  out.interval = MakeConfidenceInterval(out.value, out.sigma,
                                        experimental.size(), options.ci_level);
  const Decisions d =
      Decide(rule, Expand(rule.basis(), experimental.covariates()).values);
  for (std::uint8_t v : d) {
    if (v != 0) {
      ++out.assigned_treated;
    } else {
      ++out.assigned_control;
    }
  }
  out.pseudo_inverse_used = components.pseudo_inverse_used;
  return out;
}

double ConstantRuleValue(const ExperimentalSample& experimental,
                         const Nuisances& nuisances, bool action) {
  const Decisions d(static_cast<std::size_t>(experimental.size()),
                    action ? 1 : 0);
  const Eigen::MatrixXd phi =
      Expand(nuisances.augmented.basis, experimental.covariates()).values;
  const Eigen::MatrixXd phi_p =
      Expand(nuisances.propensity.basis, experimental.covariates()).values;
  return AipwValue(experimental.treatments(), d, nuisances.imputed,
                   nuisances.propensity.Probabilities(phi_p),
                   AugmentedTerm(nuisances.augmented, d, phi));
}

std::vector<std::string> CollectFlags(const Nuisances& nuisances,
                                      const RuleEvaluation& evaluation,
                                      const SearchResult* search, bool* fatal) {
  std::vector<std::string> flags;
  bool bad = false;
  if (nuisances.propensity.separation) {
    flags.emplace_back("propensity_separation");
    bad = true;
  }
  if (!nuisances.propensity.converged) {
    flags.emplace_back("propensity_not_converged");
  }
  if (nuisances.outcome_mean.rank_deficient) {
    flags.emplace_back("outcome_mean_rank_deficient");
  }
  if (nuisances.outcome_mean.ridge) flags.emplace_back("outcome_mean_ridge");
  if (nuisances.augmented.rank_deficient) {
    flags.emplace_back("augmented_rank_deficient");
  }
  if (nuisances.augmented.ridge) flags.emplace_back("augmented_ridge");
  if (evaluation.pseudo_inverse_used) {
    flags.emplace_back("pseudo_inverse_used");
  }
  if (search != nullptr) {
    if (search->degenerate) {
      flags.emplace_back("search_degenerate");
      bad = true;
    }
    if (!search->converged) flags.emplace_back("search_not_converged");
  }
  if (!std::isfinite(evaluation.value) || !std::isfinite(evaluation.sigma)) {
    flags.emplace_back("non_finite_estimate");
    bad = true;
  }
  if (fatal != nullptr) *fatal = bad;
  return flags;
}

Analysis RunAnalysis(const ExperimentalSample& experimental,
                     const AuxiliarySample& auxiliary,
                     const AnalysisOptions& options) {
  Nuisances nuisances = FitNuisances(experimental, auxiliary, options);
  SearchResult search =
      SearchGear(experimental, nuisances.imputed, nuisances.propensity,
                 nuisances.augmented, nuisances.rule_basis, options.search);
  RuleEvaluation evaluation =
      EvaluateRule(experimental, auxiliary, nuisances, search.rule, options);
  const double none = ConstantRuleValue(experimental, nuisances, false);
  const double all = ConstantRuleValue(experimental, nuisances, true);
  bool fatal = false;
  std::vector<std::string> flags =
      CollectFlags(nuisances, evaluation, &search, &fatal);
  return Analysis{std::move(nuisances), std::move(search),
                  std::move(evaluation), none, all, std::move(flags), fatal};
}

namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

nlohmann::json ToJson(const Nuisances& nuisances) {
  nlohmann::json j;
  j["propensity"] = ToJson(nuisances.propensity);
  j["outcome_mean"] = ToJson(nuisances.outcome_mean);
  j["augmented"] = ToJson(nuisances.augmented);
  j["rule_basis"] = nuisances.rule_basis.ToJson();
  if (nuisances.selection) {
    nlohmann::json sel;
    sel["cv_error"] = nuisances.selection->cv_error;
    sel["degree"] = nuisances.selection->spec.degree;
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : nuisances.selection->candidates) {
      cands.push_back({{"degree", c.degree},
                       {"knot_count", c.knot_count},
                       {"cv_error", c.cv_error}});
    }
    sel["candidates"] = std::move(cands);
    j["bspline_selection"] = std::move(sel);
  }
  return j;
}

nlohmann::json ToJson(const RuleEvaluation& evaluation) {
  nlohmann::json j;
  j["beta"] = ToVector(evaluation.rule.beta());
  j["basis"] = evaluation.rule.basis().ToJson();
  j["value_aipw"] = evaluation.value;
  j["value_ipw"] = evaluation.ipw_value;
  j["sigma"] = evaluation.sigma;
  j["sigma_alternate_weight"] = evaluation.sigma_ratio_weight;
  j["ci"] = ToJson(evaluation.interval);
  j["assigned_treated"] = evaluation.assigned_treated;
  j["assigned_control"] = evaluation.assigned_control;
  return j;
}

nlohmann::json ToJson(const Analysis& analysis) {
  nlohmann::json j;
  j["rule"] = ToJson(analysis.evaluation);
  j["value_treat_none"] = analysis.value_treat_none;
  j["value_treat_all"] = analysis.value_treat_all;
  j["search"] = {{"evaluations", analysis.search.evaluations},
                 {"converged", analysis.search.converged},
                 {"degenerate", analysis.search.degenerate},
                 {"objective_value", analysis.search.value},
                 {"best_by_generation", analysis.search.best_by_generation}};
  j["nuisances"] = ToJson(analysis.nuisances);
  j["flags"] = analysis.flags;
  j["fatal"] = analysis.fatal;
  return j;
}

}  // namespace gear
