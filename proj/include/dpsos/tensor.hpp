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


// Symmetric tensors stored by their free entries (sorted multi-indices), and
// the linear maps acting on them that the tensor-noise mechanism needs.

#ifndef DPSOS_TENSOR_HPP_
#define DPSOS_TENSOR_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dpsos/rng.hpp"

namespace dpsos {

class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  // Zero tensor of order t over R^d. Throws std::invalid_argument for
  // d < 1 or t < 1.
  SymmetricTensor(int d, int t);

  int dim() const { return d_; }
  int order() const { return t_; }
  // Number of free entries, C(d + t - 1, t).
  int num_free() const { return static_cast<int>(entries_.size()); }

  Eigen::VectorXd& entries() { return entries_; }
  const Eigen::VectorXd& entries() const { return entries_; }
  // Sorted multi-index of free entry `pos`.
  const std::vector<int>& multi_index(int pos) const;
  // Position of the free entry addressed by an arbitrary (unsorted)
  // multi-index.
  int position(std::vector<int> index) const;

  double at(const std::vector<int>& index) const { return entries_(position(index)); }
  double& at(const std::vector<int>& index) { return entries_(position(index)); }

  // Full d^t vectorization, row-major (last index fastest).
  Eigen::VectorXd flatten() const;
  // Inverse of flatten. Throws std::invalid_argument on a wrong length or if
  // the input is not permutation-symmetric within `tol` (relative).
  static SymmetricTensor unflatten(const Eigen::VectorXd& flat, int d, int t,
                                   double tol = 1e-9);

  // T(B, ..., B): every mode contracted with B (d' x d), i.e. B^{(x)t} vec(T).
  SymmetricTensor transform(const Eigen::MatrixXd& B) const;

  // Order-2 tensors as d x d matrices and back.
  Eigen::MatrixXd to_matrix() const;
  static SymmetricTensor from_matrix(const Eigen::MatrixXd& m);

  double frobenius_norm() const;

 private:
  int d_ = 0;
  int t_ = 0;
  Eigen::VectorXd entries_;
  std::vector<std::vector<int>> indices_;
};

// Free entries i.i.d. N(0, sigma^2). Throws std::invalid_argument for
// sigma <= 0.
SymmetricTensor sample_symmetric_tensor(int d, int t, double sigma, Rng& rng);

// Raw moment tensor sum_i p_i y_i^{(x)t} (rows of Y are the points).
SymmetricTensor moment_tensor(const Eigen::VectorXd& p, const Eigen::MatrixXd& Y, int t);

// Matrix of the map Z -> A^{(x)t} Z on free coordinates. With Z having
// i.i.d. free entries, A^{(x)t} Z has free entries M z, M = P A^{(x)t} E.
Eigen::MatrixXd free_coordinate_map(const Eigen::MatrixXd& A, int t);

std::string to_json(const SymmetricTensor& T);

}  // namespace dpsos

#endif  // DPSOS_TENSOR_HPP_
