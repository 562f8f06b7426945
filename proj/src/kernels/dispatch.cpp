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
#include <atomic>
#include <cstdlib>
#include <string>

#include "gear/error.hpp"
#include "gear/kernels.hpp"

namespace gear::kernels {

namespace {

using SumFn = double (*)(const ColumnMajorView&, const double*,
                         const double*);
using ScoresFn = void (*)(const ColumnMajorView&, const double*, double*);

struct Table {
  Backend backend;
  SumFn positive_score_sum;
  ScoresFn row_scores;
};

constexpr Table kScalarTable{Backend::kScalar, &scalar::PositiveScoreSum,
                             &scalar::RowScores};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2Table{Backend::kAvx2, &avx2::PositiveScoreSum,
                           &avx2::RowScores};
#endif
#if defined(__aarch64__)
constexpr Table kNeonTable{Backend::kNeon, &neon::PositiveScoreSum,
                           &neon::RowScores};
#endif

const Table* TableFor(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &kScalarTable;
    case Backend::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (__builtin_cpu_supports("avx2")) return &kAvx2Table;
#endif
      return nullptr;
    case Backend::kNeon:
#if defined(__aarch64__)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* Detect() {
  if (const char* env = std::getenv("GEAR_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return &kScalarTable;
    if (choice == "avx2" && TableFor(Backend::kAvx2)) {
      return TableFor(Backend::kAvx2);
    }
    if (choice == "neon" && TableFor(Backend::kNeon)) {
      return TableFor(Backend::kNeon);
    }
  }
  if (const Table* t = TableFor(Backend::kAvx2)) return t;
  if (const Table* t = TableFor(Backend::kNeon)) return t;
  return &kScalarTable;
}

std::atomic<const Table*>& Active() {
  static std::atomic<const Table*> active{Detect()};
  return active;
}

}  // namespace

std::string_view BackendName(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

bool BackendAvailable(Backend backend) { return TableFor(backend) != nullptr; }

Backend ActiveBackend() {
  return Active().load(std::memory_order_relaxed)->backend;
}

void ForceBackend(Backend backend) {
  const Table* table = TableFor(backend);
  if (table == nullptr) {
    throw Error("SIMD backend " + std::string(BackendName(backend)) +
                " is not available on this machine");
  }
  Active().store(table, std::memory_order_relaxed);
}

double PositiveScoreSum(const ColumnMajorView& basis,
                        std::span<const double> beta,
                        std::span<const double> weights) {
  return Active().load(std::memory_order_relaxed)
      ->positive_score_sum(basis, beta.data(), weights.data());
}

void RowScores(const ColumnMajorView& basis, std::span<const double> beta,
               std::span<double> out) {
  Active().load(std::memory_order_relaxed)
      ->row_scores(basis, beta.data(), out.data());
}

}  // namespace gear::kernels
