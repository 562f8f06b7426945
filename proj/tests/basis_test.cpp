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

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gear/basis.hpp"
#include "gear/error.hpp"
#include "gear/simulation.hpp"
#include "testing.hpp"

namespace gear {
namespace {

TEST_CASE("identity basis prepends the intercept") {
  Eigen::MatrixXd x(1, 2);
  x << 0.3, -0.2;
  const BasisMatrix b = Expand(BasisSpec::Identity(2), x);
  REQUIRE(b.values.cols() == 3);
  CHECK(b.values(0, 0) == 1.0);
  CHECK(b.values(0, 1) == 0.3);
  CHECK(b.values(0, 2) == -0.2);
}

TEST_CASE("degree-2 polynomial appends squares without cross terms") {
  Eigen::MatrixXd x(1, 2);
  x << 2, 3;
  const BasisSpec spec = BasisSpec::Polynomial(2, 2);
  CHECK(spec.ExpandedDim() == 5);
  const Eigen::RowVectorXd row = Expand(spec, x).values.row(0);
  CHECK(row == (Eigen::RowVectorXd(5) << 1, 2, 3, 4, 9).finished());

  const Eigen::RowVectorXd only_second =
      Expand(BasisSpec::Polynomial(2, 3, {1}), x).values.row(0);
  CHECK(only_second == (Eigen::RowVectorXd(5) << 1, 2, 3, 9, 27).finished());
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(Expand(BasisSpec::Identity(3), Eigen::MatrixXd::Zero(2, 2)),
                  DimensionError);
  CHECK_THROWS_AS(BasisSpec::Polynomial(2, 2, {5}), DimensionError);
}

// Linear hat functions on [-1, 1] with one interior knot at 0.
double Hat(double x, double center) {
  return std::max(0.0, 1.0 - std::abs(x - center));
}

TEST_CASE("degree-1 spline equals the hat functions") {
  for (double x : {-1.0, -0.75, -0.1, 0.0, 0.5, 0.9, 1.0}) {
    const Eigen::VectorXd b = EvaluateBsplineBasis(x, {0.0}, -1.0, 1.0, 1);
    REQUIRE(b.size() == 3);
    CHECK(b(0) == doctest::Approx(Hat(x, -1.0)));
    CHECK(b(1) == doctest::Approx(Hat(x, 0.0)));
    CHECK(b(2) == doctest::Approx(Hat(x, 1.0)));
  }
  const Eigen::VectorXd half = EvaluateBsplineBasis(0.5, {0.0}, -1.0, 1.0, 1);
  CHECK(half(0) == 0.0);
  CHECK(half(1) == doctest::Approx(0.5));
  CHECK(half(2) == doctest::Approx(0.5));
}

TEST_CASE("cubic spline with no interior knots is the Bernstein basis") {
  const double x = 0.3;  // t = 0.65 on [-1, 1]
  const double t = 0.65;
  const Eigen::VectorXd b = EvaluateBsplineBasis(x, {}, -1.0, 1.0, 3);
  REQUIRE(b.size() == 4);
  CHECK(b(0) == doctest::Approx((1 - t) * (1 - t) * (1 - t)));
  CHECK(b(1) == doctest::Approx(3 * t * (1 - t) * (1 - t)));
  CHECK(b(2) == doctest::Approx(3 * t * t * (1 - t)));
  CHECK(b(3) == doctest::Approx(t * t * t));
}

TEST_CASE("spline coordinates form a partition of unity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int degree = 0; degree <= 4; ++degree) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> knots(static_cast<std::size_t>(trial % 4));
      for (auto& k : knots) k = u(rng) * 0.5 + 0.5;
      std::sort(knots.begin(), knots.end());
      const double x = -2.0 + 5.0 * (trial + 0.5) / 20.0;
      const Eigen::VectorXd b = EvaluateBsplineBasis(x, knots, -2.0, 3.0, degree);
      CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.minCoeff() >= -1e-15);
    }
  }
}

TEST_CASE("out-of-span inputs clamp and raise the flag") {
  bool clamped = false;
  const Eigen::VectorXd b =
      EvaluateBsplineBasis(1.5, {0.0}, -1.0, 1.0, 2, &clamped);
  CHECK(clamped);
  const Eigen::VectorXd edge = EvaluateBsplineBasis(1.0, {0.0}, -1.0, 1.0, 2);
  CHECK((b - edge).norm() == 0.0);

  std::mt19937_64 rng(2);
  const Eigen::MatrixXd train = testing::Uniform(50, 2, rng);
  const BasisSpec spec = BasisSpec::Bspline(train, 2, 1);
  CHECK_FALSE(Expand(spec, train).clamped);
  CHECK(Expand(spec, train * 3.0).clamped);
}

TEST_CASE("tensor spline layout, intercept, and determinism") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd data = testing::Uniform(80, 3, rng);
  const BasisSpec spec = BasisSpec::Bspline(data, 2, 1);
  // Per dimension: degree + knots + 1 splines, first dropped -> 3 columns.
  CHECK(spec.ExpandedDim() == 1 + 3 * 3 + 3 * 9);
  const BasisMatrix b = Expand(spec, data);
  CHECK(b.values.cols() == spec.ExpandedDim());
  CHECK((b.values.col(0).array() == 1.0).all());
  CHECK(b.values.allFinite());
  CHECK(Expand(spec, data).values == b.values);

  // Pass-through dimensions stay linear.
  const BasisSpec partial = BasisSpec::Bspline(data, 1, 0, {0});
  const BasisMatrix p = Expand(partial, data);
  CHECK(p.values.col(p.values.cols() - 1) == data.col(2));
}

TEST_CASE("expansion commutes with row permutations") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd data = testing::Uniform(40, 3, rng);
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd permuted(40, 3);
  for (int i = 0; i < 40; ++i) permuted.row(i) = data.row(perm[i]);
  for (const BasisSpec& spec :
       {BasisSpec::Identity(3), BasisSpec::Polynomial(3, 2),
        BasisSpec::Bspline(data, 3, 2)}) {
    const Eigen::MatrixXd a = Expand(spec, data).values;
    const Eigen::MatrixXd b = Expand(spec, permuted).values;
    for (int i = 0; i < 40; ++i) CHECK(b.row(i) == a.row(perm[i]));
  }
}

TEST_CASE("basis specs survive JSON") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd data = testing::Uniform(30, 2, rng);
  for (const BasisSpec& spec :
       {BasisSpec::Identity(4), BasisSpec::Polynomial(3, 2, {0, 2}),
        BasisSpec::Bspline(data, 2, 2)}) {
    CHECK(BasisSpec::FromJson(spec.ToJson()) == spec);
  }
  CHECK_THROWS_AS(BasisSpec::FromJson(nlohmann::json{{"kind", "wavelet"}}),
                  ConfigError);
}

TEST_CASE("fold assignment is balanced and seeded") {
  const std::vector<int> a = AssignFolds(103, 5, 9);
  CHECK(a == AssignFolds(103, 5, 9));
  CHECK(a != AssignFolds(103, 5, 10));
  std::vector<int> counts(5, 0);
  for (int f : a) ++counts[static_cast<std::size_t>(f)];
  for (int c : counts) CHECK((c == 20 || c == 21));
}

TEST_CASE("noiseless linear outcome selects degree 1") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd x = testing::Uniform(200, 2, rng);
  const Eigen::MatrixXd m = testing::Uniform(200, 1, rng);
  const Eigen::VectorXd y =
      (1.0 + 2.0 * x.col(0).array() - x.col(1).array() + 0.5 * m.col(0).array())
          .matrix();
  const AuxiliarySample aux(x, m, y);
  const BsplineSelection sel = SelectBsplineSpec(aux, {1, 2, 3}, {0, 1}, 5, 3);
  CHECK(sel.spec.degree == 1);
  CHECK(sel.spec.interior_knots[0].empty());
  CHECK(sel.candidates.size() == 6);
  CHECK(sel.cv_error < 1e-20);
  const BsplineSelection again = SelectBsplineSpec(aux, {1, 2, 3}, {0, 1}, 5, 3);
  CHECK(again.spec == sel.spec);
  CHECK(again.cv_error == sel.cv_error);
}

TEST_CASE("selected spline beats the linear basis on the quadratic scenario") {
  ScenarioSpec spec;
  spec.id = ScenarioId::kS5;
  const AuxiliarySample aux = GenerateAuxiliary(spec, 400, 21);
  const BsplineSelection sel = SelectBsplineSpec(aux, {1, 2, 3}, {0, 1}, 5, 3);
  const double linear = CrossValidatedError(aux, BasisSpec::Identity(6), 5, 3);
  CHECK(sel.cv_error < linear);
}

TEST_CASE("selection preconditions") {
  const AuxiliarySample aux(Eigen::MatrixXd::Zero(3, 1),
                            Eigen::MatrixXd::Zero(3, 1),
                            Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(SelectBsplineSpec(aux, {1}, {0}, 5, 1), ConfigError);
  CHECK_THROWS_AS(SelectBsplineSpec(aux, {}, {0}, 2, 1), ConfigError);
  CHECK_THROWS_AS(SelectBsplineSpec(aux, {1}, {0}, 1, 1), ConfigError);
}

}  // namespace
}  // namespace gear
