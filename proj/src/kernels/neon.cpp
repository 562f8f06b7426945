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
// NEON variants for AArch64.

#include "gear/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace gear::kernels::neon {

namespace {

inline double Score(const ColumnMajorView& basis, const double* beta,
                    std::size_t i) {
  double score = 0.0;
  for (std::size_t j = 0; j < basis.cols; ++j) {
    const double term = basis.data[j * basis.stride + i] * beta[j];
    score = score + term;
  }
  return score;
}

inline float64x2_t Score2(const ColumnMajorView& basis, const double* beta,
                          std::size_t i) {
  float64x2_t score = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < basis.cols; ++j) {
    const float64x2_t column = vld1q_f64(basis.data + j * basis.stride + i);
    // vmulq + vaddq rather than vfmaq keeps scores identical to scalar.
    score = vaddq_f64(score, vmulq_f64(column, vdupq_n_f64(beta[j])));
  }
  return score;
}

}  // namespace

double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= basis.rows; i += 2) {
    const uint64x2_t mask = vcgtq_f64(Score2(basis, beta, i), zero);
    const uint64x2_t kept =
        vandq_u64(mask, vreinterpretq_u64_f64(vld1q_f64(weights + i)));
    acc = vaddq_f64(acc, vreinterpretq_f64_u64(kept));
  }
  double total = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < basis.rows; ++i) {
    if (Score(basis, beta, i) > 0.0) total += weights[i];
  }
  return total;
}

void RowScores(const ColumnMajorView& basis, const double* beta,
               double* out) {
  std::size_t i = 0;
  for (; i + 2 <= basis.rows; i += 2) {
    vst1q_f64(out + i, Score2(basis, beta, i));
  }
  for (; i < basis.rows; ++i) out[i] = Score(basis, beta, i);
}

}  // namespace gear::kernels::neon

#endif
