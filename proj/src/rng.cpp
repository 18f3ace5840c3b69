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

#include "dpsos/rng.hpp"

#include <cmath>

namespace dpsos {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::result_type Rng::operator()() {
  const std::uint64_t key = mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL));
  return mix(key + 0x9e3779b97f4a7c15ULL * ++counter_);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(mix(seed_ ^ mix(stream_)), mix(stream + 0xd1b54a32d192ed03ULL));
}

double Rng::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::laplace(double b) {
  const double u = uniform() - 0.5;
  return -b * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

}  // namespace dpsos
