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


#include "dpsos/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "linalg.hpp"

namespace dpsos::contamination {

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::kGaussian: return "gaussian";
    case Distribution::kTwoPoint: return "two-point";
    case Distribution::kProductRademacher: return "product-rademacher";
  }
  return "unknown";
}

Distribution distribution_from_string(const std::string& s) {
  if (s == "gaussian" || s == "gauss") return Distribution::kGaussian;
  if (s == "two-point") return Distribution::kTwoPoint;
  if (s == "product-rademacher") return Distribution::kProductRademacher;
  throw std::invalid_argument("unknown distribution: " + s);
}

Eigen::MatrixXd sample_clean(const CleanSpec& spec, Rng& rng) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("n and d must be >= 1");
  Eigen::VectorXd mean = spec.mean.size() ? spec.mean : Eigen::VectorXd::Zero(spec.d);
  Eigen::MatrixXd cov = spec.cov.size() ? spec.cov : Eigen::MatrixXd::Identity(spec.d, spec.d);
  if (mean.size() != spec.d || cov.rows() != spec.d) {
    throw std::invalid_argument("mean/covariance size mismatch");
  }
  detail::require_psd(cov, "covariance must be symmetric PSD");
  const Eigen::MatrixXd root = detail::psd_sqrt(cov, 0.0);
  Eigen::MatrixXd X(spec.n, spec.d);
  Eigen::VectorXd x(spec.d);
  for (int i = 0; i < spec.n; ++i) {
    switch (spec.distribution) {
      case Distribution::kGaussian:
        for (int j = 0; j < spec.d; ++j) x(j) = rng.normal();
        break;
      case Distribution::kTwoPoint:
        x.setZero();
        x(0) = rng.uniform() < 0.5 ? -1.0 : 1.0;
        break;
      case Distribution::kProductRademacher:
        for (int j = 0; j < spec.d; ++j) x(j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
        break;
    }
    X.row(i) = (mean + root * x).transpose();
  }
  return X;
}

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kFarCluster: return "far-cluster";
    case AdversaryKind::kHeavyTail: return "heavy-tail";
    case AdversaryKind::kSignFlip: return "sign-flip";
    case AdversaryKind::kReplaceWith: return "replace-with";
  }
  return "unknown";
}

AdversaryKind adversary_from_string(const std::string& s) {
  if (s == "far-cluster") return AdversaryKind::kFarCluster;
  if (s == "heavy-tail") return AdversaryKind::kHeavyTail;
  if (s == "sign-flip") return AdversaryKind::kSignFlip;
  if (s == "replace-with") return AdversaryKind::kReplaceWith;
  throw std::invalid_argument("unknown adversary: " + s);
}

namespace {

// Rows ordered by decreasing distance from c (ties by index).
std::vector<int> farthest_first(const Eigen::MatrixXd& X, const Eigen::VectorXd& c) {
  std::vector<int> idx(X.rows());
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd dist = (X.rowwise() - c.transpose()).rowwise().squaredNorm();
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist(a) > dist(b); });
  return idx;
}

// m distinct indices of {0..n-1}, partial Fisher-Yates.
std::vector<int> random_subset(int n, int m, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.uniform() * (n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  idx.resize(m);
  return idx;
}

}  // namespace

Corrupted corrupt(const Eigen::MatrixXd& X, const Adversary& adv, Rng& rng) {
  if (!(adv.eta >= 0.0) || adv.eta > 1.0) throw std::invalid_argument("eta must be in [0, 1]");
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const int m = static_cast<int>(std::floor(adv.eta * n + 1e-12));
  Corrupted out{X, {}};
  if (m == 0) return out;
  Eigen::VectorXd center = adv.center.size() ? adv.center : Eigen::VectorXd(X.colwise().mean());
  if (center.size() != d) throw std::invalid_argument("center has wrong dimension");

  std::vector<int> rows;
  if (adv.kind == AdversaryKind::kFarCluster || adv.kind == AdversaryKind::kSignFlip) {
    rows = farthest_first(X, center);
    rows.resize(m);
  } else {
    rows = random_subset(n, m, rng);
  }
  Eigen::VectorXd dir = adv.direction.size() ? adv.direction : Eigen::VectorXd::Unit(d, 0);
  if (dir.size() != d || dir.norm() == 0.0) throw std::invalid_argument("bad direction");
  dir.normalize();
  for (int r : rows) {
    switch (adv.kind) {
      case AdversaryKind::kFarCluster:
        out.Y.row(r) = (center + adv.offset * dir).transpose();
        break;
      case AdversaryKind::kSignFlip:
        out.Y.row(r) = (2.0 * center - X.row(r).transpose()).transpose();
        break;
      case AdversaryKind::kHeavyTail:
        for (int j = 0; j < d; ++j) {
          out.Y(r, j) = center(j) + adv.scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
        }
        break;
      case AdversaryKind::kReplaceWith:
        if (adv.point.size() != d) throw std::invalid_argument("replacement point has wrong dimension");
        out.Y.row(r) = adv.point.transpose();
        break;
    }
  }
  std::sort(rows.begin(), rows.end());
  out.replaced = std::move(rows);
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> adjacent_pair(const Eigen::MatrixXd& Y, int i,
                                                          const Eigen::VectorXd& y_new) {
  if (i < 0 || i >= Y.rows()) throw std::out_of_range("row index out of range");
  if (y_new.size() != Y.cols()) throw std::invalid_argument("replacement has wrong dimension");
  Eigen::MatrixXd other = Y;
  other.row(i) = y_new.transpose();
  return {Y, std::move(other)};
}

std::string metadata_json(const Corrupted& c, const Adversary& adv, std::uint64_t seed) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["replaced_indices"] = c.replaced;
  nlohmann::json a;
  a["kind"] = to_string(adv.kind);
  a["eta"] = adv.eta;
  if (adv.kind == AdversaryKind::kFarCluster) a["offset"] = adv.offset;
  if (adv.kind == AdversaryKind::kHeavyTail) a["scale"] = adv.scale;
  j["adversary"] = a;
  j["seed"] = seed;
  return j.dump(2);
}

}  // namespace dpsos::contamination
