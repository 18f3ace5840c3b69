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


// Clean samplers, strong-contamination adversaries and adjacent pairs.

#ifndef DPSOS_CONTAMINATION_HPP_
#define DPSOS_CONTAMINATION_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpsos/rng.hpp"

namespace dpsos::contamination {

enum class Distribution { kGaussian, kTwoPoint, kProductRademacher };

std::string to_string(Distribution d);
// Accepts "gaussian" (alias "gauss"), "two-point", "product-rademacher".
Distribution distribution_from_string(const std::string& s);

// Samples are mean + S x with S = cov^{1/2} and
//   gaussian:            x ~ N(0, I)
//   two-point:           x = xi e_1, xi uniform on {-1, +1}
//   product-rademacher:  x uniform on {-1, +1}^d
// An empty mean/cov means 0 / identity.
struct CleanSpec {
  Distribution distribution = Distribution::kGaussian;
  int n = 0;
  int d = 1;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Throws std::invalid_argument on bad sizes or a non-PSD covariance.
Eigen::MatrixXd sample_clean(const CleanSpec& spec, Rng& rng);

enum class AdversaryKind { kFarCluster, kHeavyTail, kSignFlip, kReplaceWith };

std::string to_string(AdversaryKind k);
AdversaryKind adversary_from_string(const std::string& s);

// far-cluster:  the floor(eta n) points farthest from `center` move to
//               center + offset * direction (unit-normalized).
// heavy-tail:   random rows become center + scale * (standard Cauchy)^d.
// sign-flip:    the farthest points are reflected through `center`.
// replace-with: random rows become `point`.
// An empty center means the column means of X; an empty direction e_1.
struct Adversary {
  AdversaryKind kind = AdversaryKind::kFarCluster;
  double eta = 0.0;
  double offset = 50.0;
  Eigen::VectorXd direction;
  double scale = 100.0;
  Eigen::VectorXd point;
  Eigen::VectorXd center;
};

struct Corrupted {
  Eigen::MatrixXd Y;
  std::vector<int> replaced;  // sorted row indices
};

Corrupted corrupt(const Eigen::MatrixXd& X, const Adversary& adv, Rng& rng);

// (Y, Y') with Y' equal to Y except row i := y_new. Throws std::out_of_range.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> adjacent_pair(const Eigen::MatrixXd& Y, int i,
                                                          const Eigen::VectorXd& y_new);

// Sidecar {schema_version, replaced_indices, adversary, seed}.
std::string metadata_json(const Corrupted& c, const Adversary& adv, std::uint64_t seed);

}  // namespace dpsos::contamination

#endif  // DPSOS_CONTAMINATION_HPP_
