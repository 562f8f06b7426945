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
// Least-squares and pseudo-inverse helpers used by every regression.

#ifndef GEAR_LINALG_HPP_
#define GEAR_LINALG_HPP_

#include <Eigen/Dense>

namespace gear {

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankThreshold = 1e-10;
// Penalty used when a regression has no more rows than columns, or when the
// caller asks for ridge on rank deficiency.
inline constexpr double kRidgePenalty = 1e-4;

enum class RankPolicy {
  kMinimumNorm,  // pseudo-inverse solution
  kRidge,        // (X'X/n + penalty I)^{-1} X'y/n
};

struct LeastSquaresSolution {
  Eigen::VectorXd coefficients;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  bool ridge = false;
};

// Solves min ||y - X b||. Rank is decided by an SVD with relative threshold
// kRankThreshold. When rows <= cols the ridge fallback is used regardless of
// policy.
LeastSquaresSolution SolveLeastSquares(
    const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
    RankPolicy policy = RankPolicy::kMinimumNorm);

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  bool singular = false;
};

// Moore-Penrose inverse with the same relative threshold.
PseudoInverse InvertOrPseudoInvert(const Eigen::MatrixXd& square);

}  // namespace gear

#endif  // GEAR_LINALG_HPP_
