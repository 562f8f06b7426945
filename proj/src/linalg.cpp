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
#include "gear/linalg.hpp"

#include "gear/error.hpp"

namespace gear {

namespace {

LeastSquaresSolution Ridge(const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& response) {
  const double n = static_cast<double>(design.rows());
  Eigen::MatrixXd gram = design.transpose() * design / n;
  gram.diagonal().array() += kRidgePenalty;
  LeastSquaresSolution out;
  out.coefficients = gram.ldlt().solve(design.transpose() * response / n);
  out.rank = design.cols();
  out.ridge = true;
  return out;
}

}  // namespace

LeastSquaresSolution SolveLeastSquares(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& response,
                                       RankPolicy policy) {
  if (design.rows() != response.size()) {
    throw DimensionError("design and response disagree on row count");
  }
  if (design.cols() == 0) throw DimensionError("empty design matrix");
  if (design.rows() <= design.cols()) {
    auto out = Ridge(design, response);
    out.rank_deficient = true;
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankThreshold);
  const Eigen::Index rank = svd.rank();
  if (rank < design.cols() && policy == RankPolicy::kRidge) {
    auto out = Ridge(design, response);
    out.rank_deficient = true;
    return out;
  }
  LeastSquaresSolution out;
  out.coefficients = svd.solve(response);
  out.rank = rank;
  out.rank_deficient = rank < design.cols();
  return out;
}

PseudoInverse InvertOrPseudoInvert(const Eigen::MatrixXd& square) {
  if (square.rows() != square.cols()) {
    throw DimensionError("pseudo-inverse expects a square matrix");
  }
  PseudoInverse out;
  if (square.rows() == 0) {
    out.matrix = square;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      square, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankThreshold * sv(0);
  Eigen::VectorXd inverse_sv(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff && sv(k) > 0.0) {
      inverse_sv(k) = 1.0 / sv(k);
    } else {
      inverse_sv(k) = 0.0;
      out.singular = true;
    }
  }
  out.matrix =
      svd.matrixV() * inverse_sv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

}  // namespace gear
