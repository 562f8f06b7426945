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
#include "gear/value.hpp"

#include <algorithm>
#include <cmath>

#include "gear/error.hpp"
#include "gear/kernels.hpp"

namespace gear {

namespace {

void CheckLengths(const Eigen::VectorXd& treatments, const Decisions& decisions,
                  const Eigen::VectorXd& imputed,
                  const Eigen::VectorXd& propensity) {
  const Eigen::Index n = treatments.size();
  if (static_cast<Eigen::Index>(decisions.size()) != n || imputed.size() != n ||
      propensity.size() != n) {
    throw DimensionError("value estimator inputs disagree on length");
  }
  if (n == 0) throw DimensionError("value estimator needs at least one row");
}

kernels::ColumnMajorView View(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.rows()),
          static_cast<std::size_t>(m.cols()),
          static_cast<std::size_t>(m.outerStride())};
}

// Per-row contributions under action 0 and action 1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> Contributions(
    const Eigen::VectorXd& a, const Eigen::VectorXd& mu,
    const Eigen::VectorXd& s, const Eigen::VectorXd& nu0,
    const Eigen::VectorXd& nu1) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd c0(n);
  Eigen::VectorXd c1(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c0(i) = nu0(i) + (a(i) == 0.0 ? (mu(i) - nu0(i)) / s(i) : 0.0);
    c1(i) = nu1(i) + (a(i) == 1.0 ? (mu(i) - nu1(i)) / s(i) : 0.0);
  }
  return {std::move(c0), std::move(c1)};
}

}  // namespace

DecisionRule::DecisionRule(const Eigen::VectorXd& beta, BasisSpec basis)
    : basis_(std::move(basis)) {
  if (beta.size() != basis_.ExpandedDim()) {
    throw DimensionError("rule has " + std::to_string(beta.size()) +
                         " coefficients but the basis has " +
                         std::to_string(basis_.ExpandedDim()) + " columns");
  }
  const double norm = beta.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw ConfigError("rule coefficients must be finite and not all zero");
  }
  beta_ = beta / norm;
}

Eigen::VectorXd DecisionRule::CanonicalBeta() const {
  for (Eigen::Index j = 0; j < beta_.size(); ++j) {
    if (beta_(j) != 0.0) return beta_(j) < 0.0 ? Eigen::VectorXd(-beta_) : beta_;
  }
  return beta_;
}

double FoldedDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

Decisions Decide(std::span<const double> beta,
                 const Eigen::MatrixXd& basis_matrix) {
  if (static_cast<Eigen::Index>(beta.size()) != basis_matrix.cols()) {
    throw DimensionError("rule and basis matrix widths differ");
  }
  std::vector<double> scores(static_cast<std::size_t>(basis_matrix.rows()));
  kernels::RowScores(View(basis_matrix), beta, scores);
  Decisions out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > 0.0;
  return out;
}

Decisions Decide(const DecisionRule& rule,
                 const Eigen::MatrixXd& basis_matrix) {
  return Decide(std::span<const double>(rule.beta().data(),
                                        static_cast<std::size_t>(rule.beta().size())),
                basis_matrix);
}

Eigen::VectorXd ReceivedPropensity(const Eigen::VectorXd& treatments,
                                   const Eigen::VectorXd& propensity) {
  return treatments.cwiseProduct(propensity) +
         (1.0 - treatments.array()).matrix().cwiseProduct(
             (1.0 - propensity.array()).matrix());
}

double IpwValue(const Eigen::VectorXd& treatments, const Decisions& decisions,
                const Eigen::VectorXd& imputed,
                const Eigen::VectorXd& propensity) {
  CheckLengths(treatments, decisions, imputed, propensity);
  const Eigen::VectorXd s = ReceivedPropensity(treatments, propensity);
  double total = 0.0;
  for (Eigen::Index i = 0; i < treatments.size(); ++i) {
    if (treatments(i) == decisions[static_cast<std::size_t>(i)]) {
      total += imputed(i) / s(i);
    }
  }
  return total / static_cast<double>(treatments.size());
}

double AipwValue(const Eigen::VectorXd& treatments, const Decisions& decisions,
                 const Eigen::VectorXd& imputed,
                 const Eigen::VectorXd& propensity,
                 const Eigen::VectorXd& augmentation) {
  CheckLengths(treatments, decisions, imputed, propensity);
  if (augmentation.size() != treatments.size()) {
    throw DimensionError("augmentation length mismatch");
  }
  const Eigen::VectorXd s = ReceivedPropensity(treatments, propensity);
  double total = 0.0;
  for (Eigen::Index i = 0; i < treatments.size(); ++i) {
    total += augmentation(i);
    if (treatments(i) == decisions[static_cast<std::size_t>(i)]) {
      total += (imputed(i) - augmentation(i)) / s(i);
    }
  }
  return total / static_cast<double>(treatments.size());
}

ValueEstimate IpwValue(const DecisionRule& rule,
                       const ExperimentalSample& experimental,
                       const Eigen::VectorXd& imputed,
                       const PropensityFit& propensity) {
  const Decisions d =
      Decide(rule, Expand(rule.basis(), experimental.covariates()).values);
  const Eigen::VectorXd pi = propensity.Probabilities(
      Expand(propensity.basis, experimental.covariates()).values);
  return {IpwValue(experimental.treatments(), d, imputed, pi), Estimator::kIpw};
}

ValueEstimate AipwValue(const DecisionRule& rule,
                        const ExperimentalSample& experimental,
                        const Eigen::VectorXd& imputed,
                        const PropensityFit& propensity,
                        const AugmentedFit& augmented) {
  const Decisions d =
      Decide(rule, Expand(rule.basis(), experimental.covariates()).values);
  const Eigen::VectorXd pi = propensity.Probabilities(
      Expand(propensity.basis, experimental.covariates()).values);
  const Eigen::VectorXd nu = AugmentedTerm(
      augmented, d, Expand(augmented.basis, experimental.covariates()).values);
  return {AipwValue(experimental.treatments(), d, imputed, pi, nu),
          Estimator::kAipw};
}

ValueObjective::ValueObjective(Eigen::MatrixXd basis_matrix,
                               const Eigen::VectorXd& control,
                               const Eigen::VectorXd& treated)
    : basis_(std::move(basis_matrix)) {
  if (control.size() != basis_.rows() || treated.size() != basis_.rows()) {
    throw DimensionError("objective contributions do not match the basis");
  }
  delta_ = treated - control;
  base_ = control.sum();
  // Flat up to rounding in the fitted contributions.
  const double scale = std::max(
      {1.0, control.cwiseAbs().maxCoeff(), treated.cwiseAbs().maxCoeff()});
  flat_ = delta_.size() == 0 || delta_.cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double ValueObjective::operator()(std::span<const double> beta) const {
  const double masked = kernels::PositiveScoreSum(
      View(basis_), beta,
      std::span<const double>(delta_.data(),
                              static_cast<std::size_t>(delta_.size())));
  return (base_ + masked) / static_cast<double>(basis_.rows());
}

ValueObjective MakeAipwObjective(const ExperimentalSample& experimental,
                                 const Eigen::VectorXd& imputed,
                                 const PropensityFit& propensity,
                                 const AugmentedFit& augmented,
                                 const BasisSpec& rule_basis) {
  const Eigen::MatrixXd& x = experimental.covariates();
  const Eigen::VectorXd pi =
      propensity.Probabilities(Expand(propensity.basis, x).values);
  const Eigen::VectorXd s = ReceivedPropensity(experimental.treatments(), pi);
  const Eigen::MatrixXd phi_aug = Expand(augmented.basis, x).values;
  auto [c0, c1] = Contributions(experimental.treatments(), imputed, s,
                                phi_aug * augmented.theta0,
                                phi_aug * augmented.theta1);
  return ValueObjective(Expand(rule_basis, x).values, c0, c1);
}

ValueObjective MakeIpwObjective(const ExperimentalSample& experimental,
                                const Eigen::VectorXd& imputed,
                                const PropensityFit& propensity,
                                const BasisSpec& rule_basis) {
  const Eigen::MatrixXd& x = experimental.covariates();
  const Eigen::VectorXd pi =
      propensity.Probabilities(Expand(propensity.basis, x).values);
  const Eigen::VectorXd s = ReceivedPropensity(experimental.treatments(), pi);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(experimental.size());
  auto [c0, c1] =
      Contributions(experimental.treatments(), imputed, s, zero, zero);
  return ValueObjective(Expand(rule_basis, x).values, c0, c1);
}

}  // namespace gear
