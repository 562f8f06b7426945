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
// Brute-force reference maximizer over the unit sphere in three dimensions.

#ifndef GEAR_TESTS_SPHERE_GRID_HPP_
#define GEAR_TESTS_SPHERE_GRID_HPP_

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "gear/value.hpp"

namespace gear::testing {

struct GridMaximum {
  Eigen::Vector3d point;
  double value;
};

// Evaluates the objective at `count` near-uniform Fibonacci-lattice points
// on the unit sphere and returns the best one.
inline GridMaximum SphereGridMaximum(const ValueObjective& objective,
                                     int count = 10000) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  GridMaximum best{Eigen::Vector3d::UnitX(), -INFINITY};
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double radius = std::sqrt(1.0 - z * z);
    const double angle = golden * i;
    const Eigen::Vector3d p(radius * std::cos(angle), radius * std::sin(angle), z);
    const double v = objective(std::span<const double>(p.data(), 3));
    if (v > best.value) best = {p, v};
  }
  return best;
}

}  // namespace gear::testing

#endif  // GEAR_TESTS_SPHERE_GRID_HPP_
