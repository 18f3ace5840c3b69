// Copyright 2026 The dpsos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seedable counter-based random number generator.
//
// Each draw hashes (seed, stream, counter) with the SplitMix64 finalizer, so
// streams split from a seed are independent of scheduling. Not a
// cryptographic source: production DP deployments need one.

#ifndef DPSOS_RNG_HPP_
#define DPSOS_RNG_HPP_

#include <cstdint>

namespace dpsos {

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  // Independent generator for a sub-task (worker, trial, stage).
  Rng split(std::uint64_t stream) const;

  // Uniform on (0, 1) with 53 random bits; never returns 0 or 1.
  double uniform();
  double normal();
  // Laplace(0, b).
  double laplace(double b);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpsos

#endif  // DPSOS_RNG_HPP_
