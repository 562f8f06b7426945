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
#include "gear/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gear/error.hpp"
#include "gear/linalg.hpp"

namespace gear {

namespace {

std::vector<int> AllDims(int n) {
  std::vector<int> dims(static_cast<std::size_t>(n));
  std::iota(dims.begin(), dims.end(), 0);
  return dims;
}

std::vector<int> NormalizeDims(std::vector<int> dims, int input_dim) {
  if (dims.empty()) return AllDims(input_dim);
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int d : dims) {
    if (d < 0 || d >= input_dim) {
      throw DimensionError("continuous dimension " + std::to_string(d) +
                           " out of range");
    }
  }
  return dims;
}

// Linear-interpolation quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

const char* KindName(BasisKind kind) {
  switch (kind) {
    case BasisKind::kIdentity:
      return "identity";
    case BasisKind::kPolynomial:
      return "polynomial";
    case BasisKind::kBspline:
      return "bspline";
  }
  return "identity";
}

int SplineColumns(const BasisSpec& spec, std::size_t c) {
  return static_cast<int>(spec.interior_knots[c].size()) + spec.degree;
}

}  // namespace

BasisSpec BasisSpec::Identity(int input_dim) {
  BasisSpec spec;
  spec.kind = BasisKind::kIdentity;
  spec.input_dim = input_dim;
  return spec;
}

BasisSpec BasisSpec::Polynomial(int input_dim, int degree,
                                std::vector<int> continuous_dims) {
  if (degree < 1) throw ConfigError("polynomial degree must be positive");
  BasisSpec spec;
  spec.kind = BasisKind::kPolynomial;
  spec.input_dim = input_dim;
  spec.degree = degree;
  spec.continuous_dims = NormalizeDims(std::move(continuous_dims), input_dim);
  return spec;
}

BasisSpec BasisSpec::Bspline(const Eigen::MatrixXd& data, int degree,
                             int knot_count, std::vector<int> continuous_dims,
                             int tensor_arity) {
  if (degree < 1) throw ConfigError("B-spline degree must be positive");
  if (knot_count < 0) throw ConfigError("knot count must be nonnegative");
  if (tensor_arity < 1 || tensor_arity > 2) {
    throw ConfigError("tensor arity must be 1 or 2");
  }
  if (data.rows() < 1) throw DimensionError("no data to place knots");
  BasisSpec spec;
  spec.kind = BasisKind::kBspline;
  spec.input_dim = static_cast<int>(data.cols());
  spec.degree = degree;
  spec.tensor_arity = tensor_arity;
  spec.continuous_dims =
      NormalizeDims(std::move(continuous_dims), spec.input_dim);
  for (int dim : spec.continuous_dims) {
    std::vector<double> column(data.col(dim).data(),
                               data.col(dim).data() + data.rows());
    std::sort(column.begin(), column.end());
    double lo = column.front();
    double hi = column.back();
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<double> knots;
    for (int k = 1; k <= knot_count; ++k) {
      const double q = Quantile(column, static_cast<double>(k) /
                                            static_cast<double>(knot_count + 1));
      if (q > lo && q < hi && (knots.empty() || q > knots.back())) {
        knots.push_back(q);
      }
    }
    spec.interior_knots.push_back(std::move(knots));
    spec.lower.push_back(lo);
    spec.upper.push_back(hi);
  }
  return spec;
}

Eigen::Index BasisSpec::ExpandedDim() const {
  switch (kind) {
    case BasisKind::kIdentity:
      return 1 + input_dim;
    case BasisKind::kPolynomial:
      return 1 + input_dim +
             static_cast<Eigen::Index>(degree - 1) *
                 static_cast<Eigen::Index>(continuous_dims.size());
    case BasisKind::kBspline: {
      Eigen::Index total =
          1 + input_dim - static_cast<Eigen::Index>(continuous_dims.size());
      for (std::size_t c = 0; c < continuous_dims.size(); ++c) {
        total += SplineColumns(*this, c);
      }
      if (tensor_arity >= 2) {
        for (std::size_t a = 0; a < continuous_dims.size(); ++a) {
          for (std::size_t b = a + 1; b < continuous_dims.size(); ++b) {
            total += SplineColumns(*this, a) * SplineColumns(*this, b);
          }
        }
      }
      return total;
    }
  }
  return 0;
}

nlohmann::json BasisSpec::ToJson() const {
  nlohmann::json j;
  j["kind"] = KindName(kind);
  j["input_dim"] = input_dim;
  if (kind != BasisKind::kIdentity) {
    j["degree"] = degree;
    j["continuous_dims"] = continuous_dims;
  }
  if (kind == BasisKind::kBspline) {
    j["interior_knots"] = interior_knots;
    j["lower"] = lower;
    j["upper"] = upper;
    j["tensor_arity"] = tensor_arity;
  }
  return j;
}

BasisSpec BasisSpec::FromJson(const nlohmann::json& j) {
  BasisSpec spec;
  try {
    const auto kind = j.at("kind").get<std::string>();
    spec.input_dim = j.at("input_dim").get<int>();
    if (kind == "identity") {
      spec.kind = BasisKind::kIdentity;
      return spec;
    }
    spec.degree = j.at("degree").get<int>();
    spec.continuous_dims = NormalizeDims(
        j.value("continuous_dims", std::vector<int>()), spec.input_dim);
    if (kind == "polynomial") {
      spec.kind = BasisKind::kPolynomial;
    } else if (kind == "bspline") {
      spec.kind = BasisKind::kBspline;
      spec.interior_knots =
          j.at("interior_knots").get<std::vector<std::vector<double>>>();
      spec.lower = j.at("lower").get<std::vector<double>>();
      spec.upper = j.at("upper").get<std::vector<double>>();
      spec.tensor_arity = j.value("tensor_arity", 2);
      const auto n = spec.continuous_dims.size();
      if (spec.interior_knots.size() != n || spec.lower.size() != n ||
          spec.upper.size() != n) {
        throw ConfigError("B-spline knot lists do not match continuous_dims");
      }
    } else {
      throw ConfigError("unknown basis kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed basis spec: ") + e.what());
  }
  return spec;
}

Eigen::VectorXd EvaluateBsplineBasis(double x,
                                     const std::vector<double>& interior,
                                     double lower, double upper, int degree,
                                     bool* clamped) {
  if (x < lower || x > upper) {
    if (clamped != nullptr) *clamped = true;
    x = std::clamp(x, lower, upper);
  }
  const int p = degree;
  std::vector<double> knots;
  knots.reserve(interior.size() + 2 * static_cast<std::size_t>(p + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(p + 1), lower);
  knots.insert(knots.end(), interior.begin(), interior.end());
  knots.insert(knots.end(), static_cast<std::size_t>(p + 1), upper);
  const int count = static_cast<int>(interior.size()) + p + 1;

  // Knot span: knots[span] <= x < knots[span + 1], last span closed.
  int span = count - 1;
  if (x < upper) {
    span = p;
    while (span < count - 1 && knots[static_cast<std::size_t>(span) + 1] <= x) {
      ++span;
    }
  }

  std::vector<double> local(static_cast<std::size_t>(p + 1), 0.0);
  std::vector<double> left(static_cast<std::size_t>(p + 1), 0.0);
  std::vector<double> right(static_cast<std::size_t>(p + 1), 0.0);
  local[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots[static_cast<std::size_t>(span + 1 - j)];
    right[j] = knots[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? local[r] / denom : 0.0;
      local[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    local[j] = saved;
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(count);
  for (int r = 0; r <= p; ++r) out(span - p + r) = local[r];
  return out;
}

BasisMatrix Expand(const BasisSpec& spec, const Eigen::MatrixXd& data) {
  if (data.cols() != spec.input_dim) {
    throw DimensionError("basis expects " + std::to_string(spec.input_dim) +
                         " input columns, got " +
                         std::to_string(data.cols()));
  }
  const Eigen::Index n = data.rows();
  BasisMatrix out;
  out.values.resize(n, spec.ExpandedDim());
  out.values.col(0).setOnes();
  Eigen::Index col = 1;

  switch (spec.kind) {
    case BasisKind::kIdentity:
      out.values.rightCols(spec.input_dim) = data;
      break;
    case BasisKind::kPolynomial:
      out.values.middleCols(1, spec.input_dim) = data;
      col += spec.input_dim;
      for (int power = 2; power <= spec.degree; ++power) {
        for (int dim : spec.continuous_dims) {
          out.values.col(col++) = data.col(dim).array().pow(power);
        }
      }
      break;
    case BasisKind::kBspline: {
      // Reduced spline block per continuous dim, kept for the products.
      std::vector<Eigen::MatrixXd> blocks(spec.continuous_dims.size());
      for (std::size_t c = 0; c < spec.continuous_dims.size(); ++c) {
        const int width = SplineColumns(spec, c);
        blocks[c].resize(n, width);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::VectorXd full = EvaluateBsplineBasis(
              data(i, spec.continuous_dims[c]), spec.interior_knots[c],
              spec.lower[c], spec.upper[c], spec.degree, &out.clamped);
          blocks[c].row(i) = full.tail(width).transpose();
        }
      }
      std::size_t c = 0;
      for (int dim = 0; dim < spec.input_dim; ++dim) {
        if (c < spec.continuous_dims.size() && spec.continuous_dims[c] == dim) {
          out.values.middleCols(col, blocks[c].cols()) = blocks[c];
          col += blocks[c].cols();
          ++c;
        } else {
          out.values.col(col++) = data.col(dim);
        }
      }
      if (spec.tensor_arity >= 2) {
        for (std::size_t a = 0; a < blocks.size(); ++a) {
          for (std::size_t b = a + 1; b < blocks.size(); ++b) {
            for (Eigen::Index u = 0; u < blocks[a].cols(); ++u) {
              for (Eigen::Index v = 0; v < blocks[b].cols(); ++v) {
                out.values.col(col++) =
                    blocks[a].col(u).cwiseProduct(blocks[b].col(v));
              }
            }
          }
        }
      }
      break;
    }
  }
  return out;
}

std::vector<int> AssignFolds(Eigen::Index rows, int folds,
                             std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(rows));
  for (std::size_t k = 0; k < order.size(); ++k) {
    fold_of[static_cast<std::size_t>(order[k])] = static_cast<int>(
        (k * static_cast<std::size_t>(folds)) / order.size());
  }
  return fold_of;
}

double CrossValidatedError(const AuxiliarySample& auxiliary,
                           const BasisSpec& spec, int folds,
                           std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (auxiliary.size() < folds) {
    throw ConfigError("fewer auxiliary rows than folds");
  }
  const Eigen::MatrixXd design = Expand(spec, auxiliary.Joint()).values;
  const Eigen::VectorXd& y = auxiliary.outcomes();
  const auto fold_of = AssignFolds(auxiliary.size(), folds, seed);
  double squared_error = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (Eigen::Index i = 0; i < auxiliary.size(); ++i) {
      (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    }
    const Eigen::MatrixXd train_x = design(train, Eigen::all);
    const Eigen::VectorXd train_y = y(train);
    const auto fit = SolveLeastSquares(train_x, train_y, RankPolicy::kRidge);
    const Eigen::VectorXd residual =
        y(test) - design(test, Eigen::all) * fit.coefficients;
    squared_error += residual.squaredNorm();
  }
  return squared_error / static_cast<double>(auxiliary.size());
}

BsplineSelection SelectBsplineSpec(const AuxiliarySample& auxiliary,
                                   const std::vector<int>& candidate_degrees,
                                   const std::vector<int>& candidate_knots,
                                   int folds, std::uint64_t seed,
                                   std::vector<int> continuous_dims) {
  if (candidate_degrees.empty() || candidate_knots.empty()) {
    throw ConfigError("B-spline candidate lists must be nonempty");
  }
  std::vector<int> degrees = candidate_degrees;
  std::vector<int> knots = candidate_knots;
  std::sort(degrees.begin(), degrees.end());
  std::sort(knots.begin(), knots.end());
  const Eigen::MatrixXd joint = auxiliary.Joint();

  BsplineSelection best;
  bool have_best = false;
  for (int degree : degrees) {
    for (int knot_count : knots) {
      BasisSpec spec =
          BasisSpec::Bspline(joint, degree, knot_count, continuous_dims);
      const double error = CrossValidatedError(auxiliary, spec, folds, seed);
      best.candidates.push_back({degree, knot_count, error});
      // Scores equal up to rounding count as ties and keep the simpler model.
      const double tie_band =
          1e-10 * std::max({1.0, std::abs(error), std::abs(best.cv_error)});
      if (!have_best || error < best.cv_error - tie_band) {
        best.spec = std::move(spec);
        best.cv_error = error;
        have_best = true;
      }
    }
  }
  return best;
}

}  // namespace gear
