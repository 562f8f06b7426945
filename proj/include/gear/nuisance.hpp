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
// Nuisance models: propensity score, auxiliary outcome mean, and the per-arm
// regressions of the imputed outcome that form the augmentation term.

#ifndef GEAR_NUISANCE_HPP_
#define GEAR_NUISANCE_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gear/basis.hpp"
#include "gear/data.hpp"
#include "json.hpp"

namespace gear {

// Fitted probabilities are clipped into [kPropensityClip, 1 - kPropensityClip].
inline constexpr double kPropensityClip = 1e-3;
inline constexpr double kScoreTolerance = 1e-8;
inline constexpr int kMaxIrlsIterations = 100;

enum class PropensityMode { kConstant, kLogistic };

struct PropensityFit {
  PropensityMode mode = PropensityMode::kLogistic;
  // Logistic coefficients over Expand(basis, X). Empty in constant mode.
  Eigen::VectorXd gamma;
  // Treated fraction in constant mode.
  double constant = 0.5;
  BasisSpec basis;
  int iterations = 0;
  bool converged = true;
  // IRLS hit (quasi-)separation; gamma comes from the ridge-penalized fit.
  bool separation = false;

  // Unclipped fitted probabilities for the rows of `basis_matrix`.
  Eigen::VectorXd RawProbabilities(const Eigen::MatrixXd& basis_matrix) const;
  // Clipped probabilities.
  Eigen::VectorXd Probabilities(const Eigen::MatrixXd& basis_matrix) const;
  // Inverse observed information (X'WX)^{-1}; logistic mode only.
  Eigen::MatrixXd Covariance(const Eigen::MatrixXd& basis_matrix) const;
};

struct OutcomeMeanFit {
  // Coefficients over Expand(basis, [X | M]).
  Eigen::VectorXd lambda;
  BasisSpec basis;
  bool rank_deficient = false;
  bool ridge = false;

  Eigen::VectorXd Predict(const Eigen::MatrixXd& joint) const;
};

struct AugmentedFit {
  Eigen::VectorXd theta0;
  Eigen::VectorXd theta1;
  BasisSpec basis;
  bool rank_deficient = false;
  bool ridge = false;
};

// Constant mode: treated fraction. Logistic mode: MLE by IRLS, stopping when
// the largest mean score component is below 1e-8 or after 100 iterations.
// Throws PositivityError if one arm is empty.
PropensityFit FitPropensity(const ExperimentalSample& sample,
                            const BasisSpec& basis, PropensityMode mode);

// OLS of Y_U on Expand(basis, [X_U | M_U]).
OutcomeMeanFit FitOutcomeMean(const AuxiliarySample& auxiliary,
                              const BasisSpec& basis);

// mu_U(M_E, X_E) for every experimental row.
Eigen::VectorXd ImputeOutcomes(const OutcomeMeanFit& fit,
                               const ExperimentalSample& experimental);

// Per-arm OLS of the imputed outcome on Expand(basis, X_E).
AugmentedFit FitAugmented(const ExperimentalSample& experimental,
                          const Eigen::VectorXd& imputed,
                          const BasisSpec& basis);

// nu_i = phi_i' theta0 (1 - d_i) + phi_i' theta1 d_i.
Eigen::VectorXd AugmentedTerm(const AugmentedFit& fit,
                              const std::vector<std::uint8_t>& decisions,
                              const Eigen::MatrixXd& basis_matrix);

nlohmann::json ToJson(const PropensityFit& fit);
nlohmann::json ToJson(const OutcomeMeanFit& fit);
nlohmann::json ToJson(const AugmentedFit& fit);

}  // namespace gear

#endif  // GEAR_NUISANCE_HPP_
