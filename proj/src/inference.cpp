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
#include "gear/inference.hpp"

#include <cmath>
#include <limits>

#include "gear/error.hpp"
#include "gear/linalg.hpp"

namespace gear {

namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

nlohmann::json MatrixJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(ToVector(m.row(i).transpose()));
  }
  return rows;
}

double MeanSquare(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.squaredNorm() / static_cast<double>(v.size());
}

}  // namespace

InfluenceComponents ComputeComponents(const DecisionRule& rule,
                                      const ExperimentalSample& experimental,
                                      const AuxiliarySample& auxiliary,
                                      const PropensityFit& propensity,
                                      const OutcomeMeanFit& outcome_mean,
                                      const AugmentedFit& augmented) {
  CheckCompatible(experimental, auxiliary);
  const Eigen::MatrixXd& x = experimental.covariates();
  const Eigen::VectorXd& a = experimental.treatments();
  const Eigen::Index n = experimental.size();
  const double n_e = static_cast<double>(n);
  const double n_u = static_cast<double>(auxiliary.size());

  const Decisions d = Decide(rule, Expand(rule.basis(), x).values);
  const Eigen::MatrixXd phi_p = Expand(propensity.basis, x).values;
  const Eigen::MatrixXd phi = Expand(augmented.basis, x).values;
  const Eigen::MatrixXd psi_e = Expand(outcome_mean.basis, experimental.Joint()).values;
  const Eigen::MatrixXd psi_u = Expand(outcome_mean.basis, auxiliary.Joint()).values;

  const Eigen::VectorXd mu = psi_e * outcome_mean.lambda;
  const Eigen::VectorXd mu_u = psi_u * outcome_mean.lambda;
  const Eigen::VectorXd pi_raw = propensity.RawProbabilities(phi_p);
  const Eigen::VectorXd pi = propensity.Probabilities(phi_p);
  const Eigen::VectorXd s = ReceivedPropensity(a, pi);
  const Eigen::VectorXd fit0 = phi * augmented.theta0;
  const Eigen::VectorXd fit1 = phi * augmented.theta1;
  Eigen::VectorXd nu(n);
  Eigen::VectorXd r(n);
  Eigen::VectorXd dv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool treat = d[static_cast<std::size_t>(i)] != 0;
    dv(i) = treat ? 1.0 : 0.0;
    nu(i) = treat ? fit1(i) : fit0(i);
    r(i) = a(i) == dv(i) ? 1.0 : 0.0;
  }

  InfluenceComponents c;
  c.constant_propensity = propensity.mode == PropensityMode::kConstant;

  // Base block and its centering value.
  c.xi_e_base = (r.array() * (mu - nu).array() / s.array() + nu.array()).matrix();
  c.value = c.xi_e_base.mean();
  c.xi_e_base.array() -= c.value;

  // Arm Grams and augmentation gradients.
  c.h3 = phi.transpose() * (1.0 - a.array()).matrix().asDiagonal() * phi / n_e;
  c.h4 = phi.transpose() * a.asDiagonal() * phi / n_e;
  const Eigen::VectorXd slack = (1.0 - r.array() / s.array()).matrix();
  c.g4 = phi.transpose() * slack.cwiseProduct((1.0 - dv.array()).matrix()) / n_e;
  c.g5 = phi.transpose() * slack.cwiseProduct(dv) / n_e;

  const auto h3_inv = InvertOrPseudoInvert(c.h3);
  const auto h4_inv = InvertOrPseudoInvert(c.h4);
  c.pseudo_inverse_used = h3_inv.singular || h4_inv.singular;
  const Eigen::VectorXd w0 = phi * (h3_inv.matrix * c.g4);
  const Eigen::VectorXd w1 = phi * (h4_inv.matrix * c.g5);
  c.xi_e_control = (w0.array() * (1.0 - a.array()) * (mu - fit0).array()).matrix();
  c.xi_e_treated = (w1.array() * a.array() * (mu - fit1).array()).matrix();

  // Propensity block; pi is known in constant mode.
  if (c.constant_propensity) {
    c.h1.resize(0, 0);
    c.g1.resize(0);
    c.g3.resize(0);
    c.xi_e_propensity = Eigen::VectorXd::Zero(n);
  } else {
    const Eigen::VectorXd slope = (pi_raw.array() * (1.0 - pi_raw.array())).matrix();
    c.h1 = phi_p.transpose() * slope.asDiagonal() * phi_p / n_e;
    const Eigen::VectorXd sign = (1.0 - 2.0 * a.array()).matrix();
    const Eigen::VectorXd common =
        (r.array() * sign.array() * slope.array() / s.array().square()).matrix();
    c.g1 = phi_p.transpose() * common.cwiseProduct(mu) / n_e;
    c.g3 = -(phi_p.transpose() * common.cwiseProduct(nu)) / n_e;
    const auto h1_inv = InvertOrPseudoInvert(c.h1);
    c.pseudo_inverse_used = c.pseudo_inverse_used || h1_inv.singular;
    const Eigen::VectorXd w = phi_p * (h1_inv.matrix * (c.g1 + c.g3));
    c.xi_e_propensity = w.cwiseProduct(a - pi_raw);
  }

  c.xi_e = c.xi_e_base + c.xi_e_propensity + c.xi_e_treated + c.xi_e_control;

  // Auxiliary block.
  c.h2 = psi_u.transpose() * psi_u / n_u;
  c.g2 = psi_e.transpose() * (r.array() / s.array()).matrix() / n_e;
  const auto h2_inv = InvertOrPseudoInvert(c.h2);
  c.pseudo_inverse_used = c.pseudo_inverse_used || h2_inv.singular;
  const Eigen::VectorXd wu = psi_u * (h2_inv.matrix * c.g2);
  c.xi_u = wu.cwiseProduct(auxiliary.outcomes() - mu_u);
  return c;
}

double EstimateSigma(double sigma_u_squared, double sigma_e_squared,
                     SampleRatio ratio, AuxVarianceWeight weight) {
  const double w = weight == AuxVarianceWeight::kSqrtRatio ? ratio.t
                                                           : ratio.t * ratio.t;
  return std::sqrt(w * sigma_u_squared + sigma_e_squared);
}

double EstimateSigma(const InfluenceComponents& components, SampleRatio ratio,
                     AuxVarianceWeight weight) {
  return EstimateSigma(MeanSquare(components.xi_u),
                       MeanSquare(components.xi_e), ratio, weight);
}

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  // Acklam's rational approximation (relative error < 1.2e-9) ...
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // ... then one Halley step against erfc brings it to full precision.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

ConfidenceInterval MakeConfidenceInterval(double value, double sigma,
                                          Eigen::Index n_e, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be nonnegative");
  if (n_e < 1) throw DimensionError("n_e must be positive");
  const double z = NormalQuantile(1.0 - 0.5 * (1.0 - level));
  const double half = z * sigma / std::sqrt(static_cast<double>(n_e));
  return {value - half, value + half, level, sigma};
}

nlohmann::json ToJson(const InfluenceComponents& c) {
  nlohmann::json j;
  j["H1"] = MatrixJson(c.h1);
  j["H2"] = MatrixJson(c.h2);
  j["H3"] = MatrixJson(c.h3);
  j["H4"] = MatrixJson(c.h4);
  j["G1"] = ToVector(c.g1);
  j["G2"] = ToVector(c.g2);
  j["G3"] = ToVector(c.g3);
  j["G4"] = ToVector(c.g4);
  j["G5"] = ToVector(c.g5);
  j["sigma_e_squared"] = MeanSquare(c.xi_e);
  j["sigma_u_squared"] = MeanSquare(c.xi_u);
  j["pseudo_inverse_used"] = c.pseudo_inverse_used;
  j["constant_propensity"] = c.constant_propensity;
  return j;
}

nlohmann::json ToJson(const ConfidenceInterval& interval) {
  return {{"lower", interval.lower},
          {"upper", interval.upper},
          {"level", interval.level},
          {"sigma", interval.sigma}};
}

}  // namespace gear
