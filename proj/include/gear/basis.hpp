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
// Basis expansions phi(.) shared by the regressions and the rule class.
//
// Every expansion starts with a constant column. Three kinds are supported:
//   identity    [1 | x]
//   polynomial  [1 | x | x_c^2 | ... | x_c^degree] on continuous dims c
//   bspline     [1 | per-dim spline columns | pairwise tensor products]
// Spline columns use a clamped knot vector with interior knots at empirical
// quantiles. The first spline of each dimension is dropped because the full
// set sums to one and would duplicate the intercept.

#ifndef GEAR_BASIS_HPP_
#define GEAR_BASIS_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gear/data.hpp"
#include "json.hpp"

namespace gear {

enum class BasisKind { kIdentity, kPolynomial, kBspline };

struct BasisSpec {
  BasisKind kind = BasisKind::kIdentity;
  int input_dim = 0;
  int degree = 1;
  // Sorted input dimensions that get the nonlinear expansion.
  std::vector<int> continuous_dims;
  // B-spline only, one entry per continuous dim.
  std::vector<std::vector<double>> interior_knots;
  std::vector<double> lower;
  std::vector<double> upper;
  // 1: main effects only; 2: add pairwise tensor products.
  int tensor_arity = 2;

  static BasisSpec Identity(int input_dim);
  // Empty `continuous_dims` means every dimension.
  static BasisSpec Polynomial(int input_dim, int degree,
                              std::vector<int> continuous_dims = {});
  // Boundary knots at the column range of `data`, interior knots at its
  // equispaced empirical quantiles.
  static BasisSpec Bspline(const Eigen::MatrixXd& data, int degree,
                           int knot_count,
                           std::vector<int> continuous_dims = {},
                           int tensor_arity = 2);

  Eigen::Index ExpandedDim() const;

  nlohmann::json ToJson() const;
  static BasisSpec FromJson(const nlohmann::json& j);

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

struct BasisMatrix {
  Eigen::MatrixXd values;
  // Set when some input fell outside a spline's knot span and was clamped.
  bool clamped = false;
};

// Throws DimensionError if data.cols() != spec.input_dim.
BasisMatrix Expand(const BasisSpec& spec, const Eigen::MatrixXd& data);

// All degree + |interior| + 1 B-spline values at x on the clamped knot
// vector over [lower, upper]. x outside the span is clamped and `*clamped`
// set when provided.
Eigen::VectorXd EvaluateBsplineBasis(double x,
                                     const std::vector<double>& interior,
                                     double lower, double upper, int degree,
                                     bool* clamped = nullptr);

struct BsplineCandidate {
  int degree = 0;
  int knot_count = 0;
  double cv_error = 0.0;
};

struct BsplineSelection {
  BasisSpec spec;
  double cv_error = 0.0;
  std::vector<BsplineCandidate> candidates;
};

// Mean out-of-fold squared error of the OLS regression of Y on Expand(spec,
// [X | M]). Folds come from a seeded shuffle split into contiguous blocks;
// rank-deficient folds fall back to ridge.
double CrossValidatedError(const AuxiliarySample& auxiliary,
                           const BasisSpec& spec, int folds,
                           std::uint64_t seed);

// Grid search over (degree, knot count) for the spline basis of [X | M].
// Ties go to the smaller degree, then fewer knots.
BsplineSelection SelectBsplineSpec(const AuxiliarySample& auxiliary,
                                   const std::vector<int>& candidate_degrees,
                                   const std::vector<int>& candidate_knots,
                                   int folds, std::uint64_t seed,
                                   std::vector<int> continuous_dims = {});

// Fold index of every row: seeded shuffle, then contiguous blocks.
std::vector<int> AssignFolds(Eigen::Index rows, int folds, std::uint64_t seed);

}  // namespace gear

#endif  // GEAR_BASIS_HPP_
