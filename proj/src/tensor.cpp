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


#include "dpsos/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dpsos {

namespace {

// Non-decreasing multi-indices of length t over {0..d-1}, lexicographic.
std::vector<std::vector<int>> sorted_indices(int d, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(t, 0);
  while (true) {
    out.push_back(cur);
    int pos = t - 1;
    while (pos >= 0 && cur[pos] == d - 1) --pos;
    if (pos < 0) break;
    ++cur[pos];
    for (int j = pos + 1; j < t; ++j) cur[j] = cur[pos];
  }
  return out;
}

long ipow(long base, int e) {
  long r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// Multi-index of flat position `flat` in a row-major d^t layout.
void unravel(long flat, int d, std::vector<int>& idx) {
  for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat % d);
    flat /= d;
  }
}

}  // namespace

SymmetricTensor::SymmetricTensor(int d, int t) : d_(d), t_(t) {
  if (d < 1 || t < 1) throw std::invalid_argument("tensor needs d >= 1 and t >= 1");
  indices_ = sorted_indices(d, t);
  entries_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(indices_.size()));
}

const std::vector<int>& SymmetricTensor::multi_index(int pos) const {
  return indices_.at(static_cast<std::size_t>(pos));
}

int SymmetricTensor::position(std::vector<int> index) const {
  if (static_cast<int>(index.size()) != t_) throw std::invalid_argument("index order mismatch");
  for (int i : index) {
    if (i < 0 || i >= d_) throw std::out_of_range("tensor index out of range");
  }
  std::sort(index.begin(), index.end());
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  return static_cast<int>(it - indices_.begin());
}

Eigen::VectorXd SymmetricTensor::flatten() const {
  const long total = ipow(d_, t_);
  Eigen::VectorXd flat(total);
  std::vector<int> idx(t_);
  for (long f = 0; f < total; ++f) {
    unravel(f, d_, idx);
    flat(f) = at(idx);
  }
  return flat;
}

SymmetricTensor SymmetricTensor::unflatten(const Eigen::VectorXd& flat, int d, int t,
                                           double tol) {
  SymmetricTensor out(d, t);
  if (flat.size() != ipow(d, t)) throw std::invalid_argument("flat tensor has wrong length");
  const double scale = std::max(1.0, flat.cwiseAbs().maxCoeff());
  std::vector<bool> seen(out.indices_.size(), false);
  std::vector<int> idx(t);
  for (long f = 0; f < flat.size(); ++f) {
    unravel(f, d, idx);
    const int pos = out.position(idx);
    if (!seen[pos]) {
      out.entries_(pos) = flat(f);
      seen[pos] = true;
    } else if (std::abs(out.entries_(pos) - flat(f)) > tol * scale) {
      throw std::invalid_argument("tensor is not symmetric");
    }
  }
  return out;
}

SymmetricTensor SymmetricTensor::transform(const Eigen::MatrixXd& B) const {
  if (B.cols() != d_) throw std::invalid_argument("transform dimension mismatch");
  const int dout = static_cast<int>(B.rows());
  // Contract one mode at a time; shape is (pre, cur, post) around mode m.
  Eigen::VectorXd cur = flatten();
  std::vector<long> shape(t_, d_);
  for (int m = 0; m < t_; ++m) {
    long pre = 1, post = 1;
    for (int j = 0; j < m; ++j) pre *= shape[j];
    for (int j = m + 1; j < t_; ++j) post *= shape[j];
    Eigen::VectorXd next = Eigen::VectorXd::Zero(pre * dout * post);
    for (long a = 0; a < pre; ++a) {
      for (int i = 0; i < dout; ++i) {
        for (int j = 0; j < d_; ++j) {
          const double bij = B(i, j);
          if (bij == 0.0) continue;
          next.segment((a * dout + i) * post, post) +=
              bij * cur.segment((a * d_ + j) * post, post);
        }
      }
    }
    cur = std::move(next);
    shape[m] = dout;
  }
  return unflatten(cur, dout, t_, 1e-8);
}

Eigen::MatrixXd SymmetricTensor::to_matrix() const {
  if (t_ != 2) throw std::invalid_argument("to_matrix needs an order-2 tensor");
  Eigen::MatrixXd m(d_, d_);
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < d_; ++j) m(i, j) = at({i, j});
  }
  return m;
}

SymmetricTensor SymmetricTensor::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  Eigen::Map<const Eigen::VectorXd> flat(m.data(), m.size());
  // Column-major storage equals row-major storage for symmetric matrices.
  return unflatten(flat, static_cast<int>(m.rows()), 2);
}

double SymmetricTensor::frobenius_norm() const { return flatten().norm(); }

SymmetricTensor sample_symmetric_tensor(int d, int t, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  SymmetricTensor out(d, t);
  for (int i = 0; i < out.num_free(); ++i) out.entries()(i) = sigma * rng.normal();
  return out;
}

SymmetricTensor moment_tensor(const Eigen::VectorXd& p, const Eigen::MatrixXd& Y, int t) {
  if (p.size() != Y.rows()) throw std::invalid_argument("weights and data disagree");
  SymmetricTensor out(static_cast<int>(Y.cols()), t);
  for (int pos = 0; pos < out.num_free(); ++pos) {
    Eigen::VectorXd prod = p;
    for (int j : out.multi_index(pos)) prod = prod.cwiseProduct(Y.col(j));
    out.entries()(pos) = prod.sum();
  }
  return out;
}

Eigen::MatrixXd free_coordinate_map(const Eigen::MatrixXd& A, int t) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  const int d = static_cast<int>(A.rows());
  SymmetricTensor basis(d, t);
  const int nf = basis.num_free();
  Eigen::MatrixXd M(nf, nf);
  for (int j = 0; j < nf; ++j) {
    basis.entries().setZero();
    basis.entries()(j) = 1.0;
    M.col(j) = basis.transform(A).entries();
  }
  return M;
}

std::string to_json(const SymmetricTensor& T) {
  nlohmann::json j;
  j["order"] = T.order();
  j["dim"] = T.dim();
  nlohmann::json idx = nlohmann::json::array();
  nlohmann::json val = nlohmann::json::array();
  for (int i = 0; i < T.num_free(); ++i) {
    idx.push_back(T.multi_index(i));
    val.push_back(T.entries()(i));
  }
  j["indices"] = idx;
  j["values"] = val;
  return j.dump();
}

}  // namespace dpsos
