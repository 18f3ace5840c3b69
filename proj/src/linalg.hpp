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


// Small dense linear-algebra helpers shared by the sampling and estimation
// code.

#ifndef DPSOS_SRC_LINALG_HPP_
#define DPSOS_SRC_LINALG_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace dpsos::detail {

// Symmetric square root via eigendecomposition; eigenvalues are clamped
// below at floor_rel * trace / d (and at zero).
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, double floor_rel) {
  const Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const double floor =
      std::max(0.0, floor_rel * s.trace() / static_cast<double>(std::max<Eigen::Index>(1, s.rows())));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Throws std::invalid_argument when m is not symmetric PSD up to a small
// relative tolerance.
inline void require_psd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw std::invalid_argument(what);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) throw std::invalid_argument(what);
}

}  // namespace dpsos::detail

#endif  // DPSOS_SRC_LINALG_HPP_
