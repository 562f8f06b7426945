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
// Seed derivation and worker pools shared by search and simulation.

#ifndef GEAR_PARALLEL_HPP_
#define GEAR_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

namespace gear {

// SplitMix64. Small enough to construct per candidate, so every candidate
// owns an independent stream keyed by its index.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Counter-based child seed: distinct (a, b) give unrelated streams.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  SplitMix64 mix(seed ^ (0xd1b54a32d192ed03ULL * (a + 1)));
  mix();
  SplitMix64 second(mix() ^ (0x8cb92ba72f3d8dd7ULL * (b + 1)));
  return second();
}

// GEAR_WORKERS if set and positive, else the hardware concurrency.
int DefaultWorkers();

// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; callers write results into per-index slots.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace gear

#endif  // GEAR_PARALLEL_HPP_
