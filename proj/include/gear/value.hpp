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
// Linear decision rules and the IPW / AIPW value estimators.

#ifndef GEAR_VALUE_HPP_
#define GEAR_VALUE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gear/basis.hpp"
#include "gear/data.hpp"
#include "gear/nuisance.hpp"

namespace gear {

using Decisions = std::vector<std::uint8_t>;

// d(x; beta) = 1{phi(x)' beta > 0} with ||beta|| = 1.
class DecisionRule {
 public:
  // Normalizes `beta`. Throws ConfigError if it is zero or non-finite, or
  // DimensionError if its length differs from the basis width.
  DecisionRule(const Eigen::VectorXd& beta, BasisSpec basis);

  const Eigen::VectorXd& beta() const { return beta_; }
  const BasisSpec& basis() const { return basis_; }

  // beta with its first nonzero coordinate made positive. Reporting only.
  Eigen::VectorXd CanonicalBeta() const;

 private:
  Eigen::VectorXd beta_;
  BasisSpec basis_;
};

// Sign-folded distance min(||a - b||, ||a + b||).
double FoldedDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

enum class Estimator { kIpw, kAipw };

struct ValueEstimate {
  double value = 0.0;
  Estimator estimator = Estimator::kAipw;
};

// Ties (score exactly 0) map to action 0.
Decisions Decide(const DecisionRule& rule, const Eigen::MatrixXd& basis_matrix);
Decisions Decide(std::span<const double> beta,
                 const Eigen::MatrixXd& basis_matrix);

// s_i = A_i pi_i + (1 - A_i)(1 - pi_i).
Eigen::VectorXd ReceivedPropensity(const Eigen::VectorXd& treatments,
                                   const Eigen::VectorXd& propensity);

// (1/N) sum 1{A_i = d_i} mu_i / s_i.
double IpwValue(const Eigen::VectorXd& treatments, const Decisions& decisions,
                const Eigen::VectorXd& imputed,
                const Eigen::VectorXd& propensity);

// (1/N) sum [nu_i + 1{A_i = d_i}(mu_i - nu_i) / s_i].
double AipwValue(const Eigen::VectorXd& treatments, const Decisions& decisions,
                 const Eigen::VectorXd& imputed,
                 const Eigen::VectorXd& propensity,
                 const Eigen::VectorXd& augmentation);

ValueEstimate IpwValue(const DecisionRule& rule,
                       const ExperimentalSample& experimental,
                       const Eigen::VectorXd& imputed,
                       const PropensityFit& propensity);

ValueEstimate AipwValue(const DecisionRule& rule,
                        const ExperimentalSample& experimental,
                        const Eigen::VectorXd& imputed,
                        const PropensityFit& propensity,
                        const AugmentedFit& augmented);

// The AIPW value as a function of beta, rearranged for repeated evaluation:
//   V(beta) = (1/N) [sum_i c0_i + sum_{i: phi_i' beta > 0} (c1_i - c0_i)]
// where c_a is row i's contribution when the rule assigns action a. Only the
// masked sum depends on beta and runs through the SIMD kernels.
class ValueObjective {
 public:
  ValueObjective(Eigen::MatrixXd basis_matrix, const Eigen::VectorXd& control,
                 const Eigen::VectorXd& treated);

  double operator()(std::span<const double> beta) const;

  Eigen::Index dim() const { return basis_.cols(); }
  Eigen::Index rows() const { return basis_.rows(); }
  // True when every rule has the same value.
  bool flat() const { return flat_; }
  const Eigen::MatrixXd& basis_matrix() const { return basis_; }

 private:
  Eigen::MatrixXd basis_;
  Eigen::VectorXd delta_;
  double base_ = 0.0;
  bool flat_ = false;
};

ValueObjective MakeAipwObjective(const ExperimentalSample& experimental,
                                 const Eigen::VectorXd& imputed,
                                 const PropensityFit& propensity,
                                 const AugmentedFit& augmented,
                                 const BasisSpec& rule_basis);

ValueObjective MakeIpwObjective(const ExperimentalSample& experimental,
                                const Eigen::VectorXd& imputed,
                                const PropensityFit& propensity,
                                const BasisSpec& rule_basis);

}  // namespace gear

#endif  // GEAR_VALUE_HPP_
