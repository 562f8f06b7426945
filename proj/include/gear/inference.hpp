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
// Influence-function variance of the AIPW value at the fitted rule, and the
// Wald confidence interval built from it.
//
// The experimental-sample term for row i is
//   xi_E_i = r_i (mu_i - nu_i) / s_i + nu_i - V
//          + (G1 + G3)' H1^{-1} phi_i (A_i - pi_i)
//          + G5' H4^{-1} phi_i A_i (mu_i - phi_i' theta1)
//          + G4' H3^{-1} phi_i (1 - A_i) (mu_i - phi_i' theta0)
// and the auxiliary term for row j is
//   xi_U_j = G2' H2^{-1} psi_j (Y_j - mu_j)
// with psi the outcome-mean design row. All population quantities are
// replaced by their fitted counterparts, V by the AIPW value at the rule.

#ifndef GEAR_INFERENCE_HPP_
#define GEAR_INFERENCE_HPP_

#include <Eigen/Dense>

#include "gear/data.hpp"
#include "gear/nuisance.hpp"
#include "gear/value.hpp"
#include "json.hpp"

namespace gear {

struct InfluenceComponents {
  Eigen::MatrixXd h1;  // propensity information; 0x0 in constant mode
  Eigen::MatrixXd h2;  // outcome-mean Gram over the auxiliary sample
  Eigen::MatrixXd h3;  // control-arm Gram
  Eigen::MatrixXd h4;  // treated-arm Gram
  Eigen::VectorXd g1;
  Eigen::VectorXd g2;
  Eigen::VectorXd g3;
  Eigen::VectorXd g4;
  Eigen::VectorXd g5;
  Eigen::VectorXd xi_e;
  Eigen::VectorXd xi_u;
  // Additive pieces of xi_e, each of which averages to zero.
  Eigen::VectorXd xi_e_base;
  Eigen::VectorXd xi_e_propensity;
  Eigen::VectorXd xi_e_treated;
  Eigen::VectorXd xi_e_control;
  double value = 0.0;  // AIPW value the base block is centered at
  bool pseudo_inverse_used = false;
  bool constant_propensity = false;
};

// Finite-sample H, G and xi terms at `rule`.
InfluenceComponents ComputeComponents(const DecisionRule& rule,
                                      const ExperimentalSample& experimental,
                                      const AuxiliarySample& auxiliary,
                                      const PropensityFit& propensity,
                                      const OutcomeMeanFit& outcome_mean,
                                      const AugmentedFit& augmented);

// Weight on the auxiliary variance block.
enum class AuxVarianceWeight {
  kSqrtRatio,  // t = sqrt(N_E / N_U)
  kRatio,      // t^2 = N_E / N_U
};

// sqrt(w * mean(xi_U^2) + mean(xi_E^2)).
double EstimateSigma(const InfluenceComponents& components, SampleRatio ratio,
                     AuxVarianceWeight weight = AuxVarianceWeight::kSqrtRatio);
double EstimateSigma(double sigma_u_squared, double sigma_e_squared,
                     SampleRatio ratio,
                     AuxVarianceWeight weight = AuxVarianceWeight::kSqrtRatio);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  double sigma = 0.0;
};

// value -/+ z_{(1-level)/2} sigma / sqrt(n_e).
ConfidenceInterval MakeConfidenceInterval(double value, double sigma,
                                          Eigen::Index n_e, double level);

// Standard normal quantile, |error| < 1e-12 on (0, 1).
double NormalQuantile(double p);

nlohmann::json ToJson(const InfluenceComponents& components);
nlohmann::json ToJson(const ConfidenceInterval& interval);

}  // namespace gear

#endif  // GEAR_INFERENCE_HPP_
