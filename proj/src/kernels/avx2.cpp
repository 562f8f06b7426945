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
// AVX2 variants. This file is compiled with -mavx2 but without -mfma.

#include "gear/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace gear::kernels::avx2 {

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

inline __m256d Score4(const ColumnMajorView& basis, const double* beta,
                      std::size_t i) {
  __m256d score = _mm256_setzero_pd();
  for (std::size_t j = 0; j < basis.cols; ++j) {
    const __m256d column = _mm256_loadu_pd(basis.data + j * basis.stride + i);
    score = _mm256_add_pd(score,
                          _mm256_mul_pd(column, _mm256_set1_pd(beta[j])));
  }
  return score;
}

}  // namespace

double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  // Two independent blocks per iteration hide the add latency.
  for (; i + 8 <= basis.rows; i += 8) {
    const __m256d s0 = Score4(basis, beta, i);
    const __m256d s1 = Score4(basis, beta, i + 4);
    const __m256d m0 = _mm256_cmp_pd(s0, zero, _CMP_GT_OQ);
    const __m256d m1 = _mm256_cmp_pd(s1, zero, _CMP_GT_OQ);
    acc0 = _mm256_add_pd(acc0, _mm256_and_pd(m0, _mm256_loadu_pd(weights + i)));
    acc1 = _mm256_add_pd(
        acc1, _mm256_and_pd(m1, _mm256_loadu_pd(weights + i + 4)));
  }
  for (; i + 4 <= basis.rows; i += 4) {
    const __m256d s0 = Score4(basis, beta, i);
    const __m256d m0 = _mm256_cmp_pd(s0, zero, _CMP_GT_OQ);
    acc0 = _mm256_add_pd(acc0, _mm256_and_pd(m0, _mm256_loadu_pd(weights + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < basis.rows; ++i) {
    if (Score(basis, beta, i) > 0.0) total += weights[i];
  }
  return total;
}

void RowScores(const ColumnMajorView& basis, const double* beta,
               double* out) {
  std::size_t i = 0;
  for (; i + 4 <= basis.rows; i += 4) {
    _mm256_storeu_pd(out + i, Score4(basis, beta, i));
  }
  for (; i < basis.rows; ++i) out[i] = Score(basis, beta, i);
}

}  // namespace gear::kernels::avx2

#endif
