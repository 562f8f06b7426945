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
#include "gear/kernels.hpp"

namespace gear::kernels::scalar {

double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < basis.rows; ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < basis.cols; ++j) {
      const double term = basis.data[j * basis.stride + i] * beta[j];
      score = score + term;
    }
    if (score > 0.0) total += weights[i];
  }
  return total;
}

void RowScores(const ColumnMajorView& basis, const double* beta,
               double* out) {
  for (std::size_t i = 0; i < basis.rows; ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < basis.cols; ++j) {
      const double term = basis.data[j * basis.stride + i] * beta[j];
      score = score + term;
    }
    out[i] = score;
  }
}

}  // namespace gear::kernels::scalar
