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
// Derivative-free maximization of the value objective over unit-norm rules.
//
// A seeded evolutionary search (tournament selection, blend crossover,
// Gaussian mutation) explores raw coefficient vectors in a symmetric box;
// each candidate is normalized before evaluation. The best candidate is then
// polished with Nelder-Mead simplex descent from several jittered starts.

#ifndef GEAR_SEARCH_HPP_
#define GEAR_SEARCH_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gear/basis.hpp"
#include "gear/data.hpp"
#include "gear/nuisance.hpp"
#include "gear/value.hpp"
#include "json.hpp"

namespace gear {

struct SearchConfig {
  int population_size = 3000;
  int generations = 50;
  double box = 10.0;
  int polish_restarts = 5;
  std::uint64_t seed = 1;
  // Improvements at or below this count as no progress.
  double tolerance = 1e-6;
  // Stop after this many consecutive generations without progress.
  int stall_generations = 10;
  // Threads for candidate evaluation; results do not depend on it.
  int workers = 1;

  // Throws ConfigError on nonpositive fields.
  void Validate() const;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static SearchConfig FromJson(const nlohmann::json& j);
  static SearchConfig FromJson(const nlohmann::json& j,
                               const SearchConfig& defaults);
};

struct SearchResult {
  DecisionRule rule;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
  // The objective is constant in beta; `rule` is an arbitrary unit vector.
  bool degenerate = false;
  // Best value after each generation (nondecreasing).
  std::vector<double> best_by_generation;
};

SearchResult SearchGear(const ValueObjective& objective,
                        const BasisSpec& rule_basis,
                        const SearchConfig& config);

// Builds the AIPW objective from the fitted nuisances and searches it. The
// reported value is re-evaluated with the reference AIPW estimator.
SearchResult SearchGear(const ExperimentalSample& experimental,
                        const Eigen::VectorXd& imputed,
                        const PropensityFit& propensity,
                        const AugmentedFit& augmented,
                        const BasisSpec& rule_basis,
                        const SearchConfig& config);

}  // namespace gear

#endif  // GEAR_SEARCH_HPP_
