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
#include "gear/nuisance.hpp"

#include <algorithm>
#include <cmath>

#include "gear/error.hpp"
#include "gear/linalg.hpp"

namespace gear {

namespace {

Eigen::VectorXd Sigmoid(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

double LogLikelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& a) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + exp(eta)) computed without overflow.
    const double softplus = eta(i) > 0.0
                                ? eta(i) + std::log1p(std::exp(-eta(i)))
                                : std::log1p(std::exp(eta(i)));
    total += a(i) * eta(i) - softplus;
  }
  return total;
}

struct IrlsResult {
  Eigen::VectorXd gamma;
  int iterations = 0;
  bool converged = false;
  bool diverging = false;
};

// Newton-Raphson on the (optionally ridge-penalized) mean log-likelihood.
// The intercept column is never penalized.
IrlsResult Irls(const Eigen::MatrixXd& phi, const Eigen::VectorXd& a,
                double penalty) {
  const Eigen::Index p = phi.cols();
  const double n = static_cast<double>(phi.rows());
  Eigen::VectorXd penalty_diag = Eigen::VectorXd::Constant(p, penalty);
  penalty_diag(0) = 0.0;

  IrlsResult result;
  result.gamma = Eigen::VectorXd::Zero(p);
  const double rate = std::clamp(a.mean(), 1e-6, 1.0 - 1e-6);
  result.gamma(0) = std::log(rate / (1.0 - rate));

  auto objective = [&](const Eigen::VectorXd& g) {
    return LogLikelihood(phi * g, a) / n -
           0.5 * (penalty_diag.array() * g.array().square()).sum();
  };

  double current = objective(result.gamma);
  for (int it = 0; it < kMaxIrlsIterations; ++it) {
    const Eigen::VectorXd pi = Sigmoid(phi * result.gamma);
    const Eigen::VectorXd score =
        phi.transpose() * (a - pi) / n -
        penalty_diag.cwiseProduct(result.gamma);
    result.iterations = it;
    if (score.cwiseAbs().maxCoeff() < kScoreTolerance) {
      result.converged = true;
      return result;
    }
    const Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
    Eigen::MatrixXd info = phi.transpose() * w.asDiagonal() * phi / n;
    info.diagonal() += penalty_diag;
    Eigen::VectorXd step = InvertOrPseudoInvert(info).matrix * score;

    // Step halving keeps the objective nondecreasing.
    double scale = 1.0;
    Eigen::VectorXd candidate = result.gamma + step;
    double next = objective(candidate);
    while (!(next >= current) && scale > 1e-10) {
      scale *= 0.5;
      candidate = result.gamma + scale * step;
      next = objective(candidate);
    }
    result.gamma = candidate;
    current = next;
    if (!result.gamma.allFinite() ||
        (phi * result.gamma).cwiseAbs().maxCoeff() > 30.0) {
      result.diverging = true;
      return result;
    }
  }
  const Eigen::VectorXd pi = Sigmoid(phi * result.gamma);
  const Eigen::VectorXd score = phi.transpose() * (a - pi) / n -
                                penalty_diag.cwiseProduct(result.gamma);
  result.iterations = kMaxIrlsIterations;
  result.converged = score.cwiseAbs().maxCoeff() < kScoreTolerance;
  return result;
}

}  // namespace

Eigen::VectorXd PropensityFit::RawProbabilities(
    const Eigen::MatrixXd& basis_matrix) const {
  if (mode == PropensityMode::kConstant) {
    return Eigen::VectorXd::Constant(basis_matrix.rows(), constant);
  }
  if (basis_matrix.cols() != gamma.size()) {
    throw DimensionError("propensity basis width mismatch");
  }
  return Sigmoid(basis_matrix * gamma);
}

Eigen::VectorXd PropensityFit::Probabilities(
    const Eigen::MatrixXd& basis_matrix) const {
  return RawProbabilities(basis_matrix)
      .cwiseMax(kPropensityClip)
      .cwiseMin(1.0 - kPropensityClip);
}

Eigen::MatrixXd PropensityFit::Covariance(
    const Eigen::MatrixXd& basis_matrix) const {
  if (mode != PropensityMode::kLogistic) {
    throw Error("covariance is only defined for the logistic propensity");
  }
  const Eigen::VectorXd pi = RawProbabilities(basis_matrix);
  const Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
  const Eigen::MatrixXd info =
      basis_matrix.transpose() * w.asDiagonal() * basis_matrix;
  return InvertOrPseudoInvert(info).matrix;
}

PropensityFit FitPropensity(const ExperimentalSample& sample,
                            const BasisSpec& basis, PropensityMode mode) {
  if (!sample.BothArmsPresent()) {
    throw PositivityError(
        "propensity requires both treatment arms in the experimental sample");
  }
  PropensityFit fit;
  fit.mode = mode;
  fit.basis = basis;
  if (mode == PropensityMode::kConstant) {
    fit.constant = sample.treatments().mean();
    return fit;
  }
  const Eigen::MatrixXd phi = Expand(basis, sample.covariates()).values;
  IrlsResult result = Irls(phi, sample.treatments(), 0.0);
  if (result.diverging || !result.converged) {
    result = Irls(phi, sample.treatments(), kRidgePenalty);
    fit.separation = true;
  }
  fit.gamma = std::move(result.gamma);
  fit.iterations = result.iterations;
  fit.converged = result.converged;
  return fit;
}

Eigen::VectorXd OutcomeMeanFit::Predict(const Eigen::MatrixXd& joint) const {
  return Expand(basis, joint).values * lambda;
}

OutcomeMeanFit FitOutcomeMean(const AuxiliarySample& auxiliary,
                              const BasisSpec& basis) {
  const Eigen::MatrixXd design = Expand(basis, auxiliary.Joint()).values;
  const auto solution = SolveLeastSquares(design, auxiliary.outcomes());
  OutcomeMeanFit fit;
  fit.lambda = solution.coefficients;
  fit.basis = basis;
  fit.rank_deficient = solution.rank_deficient;
  fit.ridge = solution.ridge;
  return fit;
}

Eigen::VectorXd ImputeOutcomes(const OutcomeMeanFit& fit,
                               const ExperimentalSample& experimental) {
  return fit.Predict(experimental.Joint());
}

AugmentedFit FitAugmented(const ExperimentalSample& experimental,
                          const Eigen::VectorXd& imputed,
                          const BasisSpec& basis) {
  if (imputed.size() != experimental.size()) {
    throw DimensionError("imputed outcomes do not match the sample size");
  }
  if (!experimental.BothArmsPresent()) {
    throw PositivityError("augmented term requires both treatment arms");
  }
  const Eigen::MatrixXd phi = Expand(basis, experimental.covariates()).values;
  std::vector<Eigen::Index> control;
  std::vector<Eigen::Index> treated;
  for (Eigen::Index i = 0; i < experimental.size(); ++i) {
    (experimental.treatments()(i) == 1.0 ? treated : control).push_back(i);
  }
  const auto fit0 = SolveLeastSquares(phi(control, Eigen::all), imputed(control));
  const auto fit1 = SolveLeastSquares(phi(treated, Eigen::all), imputed(treated));
  AugmentedFit fit;
  fit.theta0 = fit0.coefficients;
  fit.theta1 = fit1.coefficients;
  fit.basis = basis;
  fit.rank_deficient = fit0.rank_deficient || fit1.rank_deficient;
  fit.ridge = fit0.ridge || fit1.ridge;
  return fit;
}

Eigen::VectorXd AugmentedTerm(const AugmentedFit& fit,
                              const std::vector<std::uint8_t>& decisions,
                              const Eigen::MatrixXd& basis_matrix) {
  if (static_cast<Eigen::Index>(decisions.size()) != basis_matrix.rows()) {
    throw DimensionError("decision vector length mismatch");
  }
  const Eigen::VectorXd control = basis_matrix * fit.theta0;
  const Eigen::VectorXd treated = basis_matrix * fit.theta1;
  Eigen::VectorXd nu(basis_matrix.rows());
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    nu(i) = decisions[static_cast<std::size_t>(i)] ? treated(i) : control(i);
  }
  return nu;
}

namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

nlohmann::json ToJson(const PropensityFit& fit) {
  nlohmann::json j;
  j["mode"] = fit.mode == PropensityMode::kConstant ? "constant" : "logistic";
  if (fit.mode == PropensityMode::kConstant) {
    j["constant"] = fit.constant;
  } else {
    j["gamma"] = ToVector(fit.gamma);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["separation"] = fit.separation;
  }
  j["basis"] = fit.basis.ToJson();
  return j;
}

nlohmann::json ToJson(const OutcomeMeanFit& fit) {
  return {{"lambda", ToVector(fit.lambda)},
          {"basis", fit.basis.ToJson()},
          {"rank_deficient", fit.rank_deficient},
          {"ridge", fit.ridge}};
}

nlohmann::json ToJson(const AugmentedFit& fit) {
  return {{"theta0", ToVector(fit.theta0)},
          {"theta1", ToVector(fit.theta1)},
          {"basis", fit.basis.ToJson()},
          {"rank_deficient", fit.rank_deficient},
          {"ridge", fit.ridge}};
}

}  // namespace gear
