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

#include <random>

#include "doctest.h"
#include "gear/linalg.hpp"
#include "testing.hpp"

namespace gear {
namespace {

TEST_CASE("full-rank least squares satisfies the normal equations") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = testing::Uniform(50, 4, rng);
  const Eigen::VectorXd y = testing::Uniform(50, 1, rng);
  const LeastSquaresSolution s = SolveLeastSquares(x, y);
  CHECK(s.rank == 4);
  CHECK_FALSE(s.rank_deficient);
  CHECK_FALSE(s.ridge);
  const Eigen::VectorXd score = x.transpose() * (y - x * s.coefficients) / 50.0;
  CHECK(score.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exact interpolation through three collinear points") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 1, 1, 1, 2;
  const LeastSquaresSolution s = SolveLeastSquares(x, Eigen::Vector3d(0, 1, 2));
  CHECK(s.coefficients(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.coefficients(1) == doctest::Approx(1.0));
}

TEST_CASE("duplicated columns give the minimum-norm solution") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd x(30, 3);
  x.col(0).setOnes();
  x.col(1) = testing::Uniform(30, 1, rng);
  x.col(2) = x.col(1);
  const Eigen::VectorXd y = 2.0 + 4.0 * x.col(1).array();
  const LeastSquaresSolution s = SolveLeastSquares(x, y);
  CHECK(s.rank_deficient);
  CHECK(s.rank == 2);
  CHECK(s.coefficients(1) == doctest::Approx(2.0));
  CHECK(s.coefficients(2) == doctest::Approx(2.0));
  CHECK((x * s.coefficients - y).norm() < 1e-9);

  const LeastSquaresSolution r = SolveLeastSquares(x, y, RankPolicy::kRidge);
  CHECK(r.ridge);
  CHECK(r.coefficients(1) == doctest::Approx(r.coefficients(2)));
}

TEST_CASE("wide designs fall back to ridge") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd x = testing::Uniform(3, 5, rng);
  const LeastSquaresSolution s =
      SolveLeastSquares(x, Eigen::Vector3d(1, 2, 3));
  CHECK(s.ridge);
  CHECK(s.coefficients.allFinite());
}

TEST_CASE("pseudo-inverse of a singular Gram") {
  Eigen::Matrix2d g;
  g << 1, 1, 1, 1;
  const PseudoInverse p = InvertOrPseudoInvert(g);
  CHECK(p.singular);
  CHECK((g * p.matrix * g - g).norm() < 1e-12);
  const PseudoInverse q = InvertOrPseudoInvert(Eigen::Matrix2d::Identity() * 4);
  CHECK_FALSE(q.singular);
  CHECK(q.matrix(0, 0) == doctest::Approx(0.25));
}

}  // namespace
}  // namespace gear
