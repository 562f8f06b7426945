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
// Data-parallel inner loops of the value objective.
//
// Every kernel has a scalar reference implementation and SIMD variants
// (AVX2 on x86-64, NEON on AArch64). The variant is chosen once at runtime
// from the CPU's capabilities; GEAR_SIMD=scalar|avx2|neon overrides it.
//
// Row scores are accumulated column by column with separate multiply and add
// (no fused multiply-add), so every backend produces bit-identical scores and
// therefore identical decisions. Reductions over rows differ only in
// summation order.

#ifndef GEAR_KERNELS_HPP_
#define GEAR_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

namespace gear::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view BackendName(Backend backend);

// Element (i, j) lives at data[j * stride + i].
struct ColumnMajorView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;
};

// Sum of weights[i] over the rows whose score basis_i . beta is > 0.
double PositiveScoreSum(const ColumnMajorView& basis,
                        std::span<const double> beta,
                        std::span<const double> weights);

// out[i] = basis_i . beta.
void RowScores(const ColumnMajorView& basis, std::span<const double> beta,
               std::span<double> out);

// Backend-specific entry points, exposed for equivalence testing.
namespace scalar {
double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights);
void RowScores(const ColumnMajorView& basis, const double* beta, double* out);
}  // namespace scalar

namespace avx2 {
double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights);
void RowScores(const ColumnMajorView& basis, const double* beta, double* out);
}  // namespace avx2

namespace neon {
double PositiveScoreSum(const ColumnMajorView& basis, const double* beta,
                        const double* weights);
void RowScores(const ColumnMajorView& basis, const double* beta, double* out);
}  // namespace neon

// True when the binary was built with the variant and the CPU supports it.
bool BackendAvailable(Backend backend);

Backend ActiveBackend();

// Throws gear::Error if the backend is unavailable. Intended for tests and
// benchmarks; not safe to call while other threads run kernels.
void ForceBackend(Backend backend);

}  // namespace gear::kernels

#endif  // GEAR_KERNELS_HPP_
