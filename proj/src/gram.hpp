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

// Internal helpers for Gram-matrix (sum-of-squares) constraints on forms in
// the direction variables v_1..v_d.

#ifndef DPSOS_SRC_GRAM_HPP_
#define DPSOS_SRC_GRAM_HPP_

#include <cmath>
#include <map>
#include <vector>

#include "dpsos/poly.hpp"
#include "dpsos/sdp.hpp"

namespace dpsos::detail {

// z(v) = homogeneous monomials of degree `half`; z^T G z expands into forms
// of degree 2*half. Each svec entry of G contributes `coef` to the
// coefficient of monomial full[row].
struct GramLayout {
  struct Entry {
    int svec_pos;
    int row;
    double coef;
  };
  int d = 0;
  std::vector<poly::Monomial> half;
  std::vector<poly::Monomial> full;
  std::map<poly::Monomial, int> row_of;
  std::vector<Entry> entries;

  int side() const { return static_cast<int>(half.size()); }
  int rows() const { return static_cast<int>(full.size()); }

  GramLayout(int dim, int half_degree) : d(dim) {
    half = poly::homogeneous_monomials(dim, half_degree);
    full = poly::homogeneous_monomials(dim, 2 * half_degree);
    for (int i = 0; i < rows(); ++i) row_of.emplace(full[i], i);
    const int s = side();
    for (int j = 0; j < s; ++j) {
      for (int i = j; i < s; ++i) {
        const int row = row_of.at(half[i] * half[j]);
        // Off-diagonal svec entries carry sqrt(2) and appear twice in z^T G z.
        entries.push_back({sdp::svec_index(s, i, j), row, i == j ? 1.0 : M_SQRT2});
      }
    }
  }

  // Coefficient vector of a form of degree 2*half in the `full` ordering.
  std::vector<double> coefficients(const poly::Polynomial& p) const {
    std::vector<double> c(full.size(), 0.0);
    for (const auto& [m, v] : p.terms()) {
      auto it = row_of.find(m);
      if (it != row_of.end()) c[it->second] += v;
    }
    return c;
  }
};

// <a, v>^power as a polynomial in v_1..v_d.
inline poly::Polynomial linear_power(const double* a, int d, int power) {
  poly::Polynomial lin;
  for (int j = 0; j < d; ++j) lin.add_term(poly::Monomial::variable(j + 1), a[j]);
  return lin.pow(power);
}

// |v|^{2 half} as a polynomial in v_1..v_d.
inline poly::Polynomial norm_power(int d, int half) {
  poly::Polynomial sq;
  for (int j = 0; j < d; ++j) sq.add_term(poly::Monomial::variable(j + 1, 2), 1.0);
  return sq.pow(half);
}

}  // namespace dpsos::detail

#endif  // DPSOS_SRC_GRAM_HPP_
