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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gear/error.hpp"
#include "gear/kernels.hpp"
#include "gear/nuisance.hpp"
#include "gear/simulation.hpp"
#include "gear/value.hpp"
#include "testing.hpp"

namespace gear {
namespace {

Eigen::VectorXd Beta0() {
  Eigen::VectorXd b(5);
  b << 0, 0.5, -0.5, -0.5, 0.5;
  return b;
}

TEST_CASE("decisions follow the strict sign of the score") {
  const DecisionRule rule(Beta0(), BasisSpec::Identity(4));
  CHECK(rule.beta().norm() == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::MatrixXd phi(3, 5);
  phi << 1, 1, -1, -1, 1,   // score 2 / |beta| > 0
         1, 1, 1, 0, 0,     // score 0 -> control
         1, -1, 0, 0, 0;    // negative
  CHECK(Decide(rule, phi) == Decisions{1, 0, 0});
  const DecisionRule tripled(3.0 * Beta0(), BasisSpec::Identity(4));
  CHECK(Decide(tripled, phi) == Decide(rule, phi));
  CHECK((tripled.beta() - rule.beta()).norm() < 1e-15);
}

TEST_CASE("rule construction checks") {
  CHECK_THROWS_AS(DecisionRule(Eigen::VectorXd::Zero(5), BasisSpec::Identity(4)),
                  ConfigError);
  CHECK_THROWS_AS(DecisionRule(Eigen::VectorXd::Ones(3), BasisSpec::Identity(4)),
                  DimensionError);
  const DecisionRule neg(-Beta0(), BasisSpec::Identity(4));
  CHECK(neg.CanonicalBeta()(1) > 0.0);
  CHECK(FoldedDistance(neg.beta(), Beta0()) < 1e-15);
}

TEST_CASE("hand-computed IPW and AIPW values") {
  const Eigen::Vector2d a(1, 0), mu(2, 4), pi(0.5, 0.5), nu(1, 3);
  const Decisions d{1, 1};
  CHECK(IpwValue(a, d, mu, pi) == doctest::Approx(2.0));
  CHECK(AipwValue(a, d, mu, pi, nu) == doctest::Approx(3.0));
  CHECK(AipwValue(a, d, mu, pi, Eigen::Vector2d::Zero()) == IpwValue(a, d, mu, pi));
  // nu equal to mu leaves the plain mean.
  CHECK(AipwValue(a, d, mu, Eigen::Vector2d(0.2, 0.9), mu) == doctest::Approx(3.0));
}

TEST_CASE("matching decisions under a fair coin double the mean") {
  const Eigen::Vector4d a(1, 0, 0, 1), mu(1, 2, 3, 4);
  const Eigen::Vector4d pi = Eigen::Vector4d::Constant(0.5);
  const Decisions d{1, 0, 0, 1};
  CHECK(IpwValue(a, d, mu, pi) == doctest::Approx(2.0 * mu.mean()));
  CHECK(IpwValue(a, d, Eigen::Vector4d::Constant(1.5), pi) == doctest::Approx(3.0));
}

TEST_CASE("AIPW minus IPW equals the augmentation identity") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 50 + trial;
    const Eigen::VectorXd a = testing::Coins(n, rng);
    const Eigen::VectorXd mu = testing::Uniform(n, 1, rng, -5, 5);
    const Eigen::VectorXd pi = testing::Uniform(n, 1, rng, 0.01, 0.99);
    const Eigen::VectorXd nu = testing::Uniform(n, 1, rng, -5, 5);
    const Eigen::VectorXd coin = testing::Coins(n, rng);
    Decisions d(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = coin(i) != 0;
    const Eigen::VectorXd s = ReceivedPropensity(a, pi);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = a(i) == d[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
      expected += nu(i) * (1.0 - r / s(i));
    }
    expected /= static_cast<double>(n);
    CHECK(AipwValue(a, d, mu, pi, nu) - IpwValue(a, d, mu, pi) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

struct Fits {
  ExperimentalSample e;
  AuxiliarySample u;
  PropensityFit prop;
  Eigen::VectorXd mu;
  AugmentedFit aug;
};

Fits FitScenario(const ScenarioSpec& spec, Eigen::Index n, std::uint64_t seed,
                 const BasisSpec& rule_basis) {
  ExperimentalSample e = GenerateExperimental(spec, n, seed);
  AuxiliarySample u = GenerateAuxiliary(spec, n, seed + 1000);
  PropensityFit prop = FitPropensity(e, BasisSpec::Identity(spec.r()),
                                     PropensityMode::kLogistic);
  Eigen::VectorXd mu = ImputeOutcomes(
      FitOutcomeMean(u, BasisSpec::Identity(spec.r() + spec.s())), e);
  AugmentedFit aug = FitAugmented(e, mu, rule_basis);
  return {std::move(e), std::move(u), std::move(prop), std::move(mu),
          std::move(aug)};
}

TEST_CASE("the fast objective equals the reference estimator") {
  ScenarioSpec spec;
  const BasisSpec basis = BasisSpec::Polynomial(4, 2);
  const Fits f = FitScenario(spec, 300, 1, basis);
  const ValueObjective aipw = MakeAipwObjective(f.e, f.mu, f.prop, f.aug, basis);
  const ValueObjective ipw = MakeIpwObjective(f.e, f.mu, f.prop, basis);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (kernels::Backend backend :
       {kernels::Backend::kScalar, kernels::Backend::kAvx2,
        kernels::Backend::kNeon}) {
    if (!kernels::BackendAvailable(backend)) continue;
    kernels::ForceBackend(backend);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd beta(basis.ExpandedDim());
      for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = n(rng);
      const DecisionRule rule(beta, basis);
      const std::span<const double> raw(rule.beta().data(),
                                        static_cast<std::size_t>(beta.size()));
      CHECK(aipw(raw) == doctest::Approx(
                             AipwValue(rule, f.e, f.mu, f.prop, f.aug).value)
                             .epsilon(1e-12));
      CHECK(ipw(raw) ==
            doctest::Approx(IpwValue(rule, f.e, f.mu, f.prop).value).epsilon(1e-12));
    }
  }
  kernels::ForceBackend(kernels::Backend::kScalar);
}

TEST_CASE("constant nuisances give a flat objective") {
  ScenarioSpec spec;
  const BasisSpec basis = BasisSpec::Identity(4);
  Fits f = FitScenario(spec, 100, 2, basis);
  f.mu.setConstant(2.5);
  f.aug = FitAugmented(f.e, f.mu, basis);
  const ValueObjective obj = MakeAipwObjective(f.e, f.mu, f.prop, f.aug, basis);
  CHECK(obj.flat());
}

TEST_CASE("AIPW at the reference rule is close to the true value") {
  // Sampling sd of the estimator at N_E = 4000 is about 0.05 here, so each
  // seed is held to four of its own standard errors and the seed average to
  // the tighter band.
  ScenarioSpec spec;
  const BasisSpec basis = BasisSpec::Identity(4);
  double total = 0.0;
  const int seeds = 6;
  for (int seed = 0; seed < seeds; ++seed) {
    const Fits f = FitScenario(spec, 4000, 100 + seed, basis);
    const DecisionRule rule(Beta0(), basis);
    const double v = AipwValue(rule, f.e, f.mu, f.prop, f.aug).value;
    CHECK(std::abs(v - 0.867) < 4.0 * 0.055);
    total += v;
  }
  CHECK(std::abs(total / seeds - 0.867) < 0.05);
}

}  // namespace
}  // namespace gear
