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

#ifndef DPSOS_POLY_HPP_
#define DPSOS_POLY_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dpsos::poly {

// A monomial is a sparse list of (variable id, exponent) pairs sorted by
// variable id. Zero exponents are never stored.
class Monomial {
 public:
  Monomial() = default;
  // Builds from arbitrary (var, exp) pairs; duplicates are merged and zero
  // exponents dropped. Throws std::invalid_argument on negative exponents.
  explicit Monomial(std::vector<std::pair<int, int>> exponents);

  static Monomial variable(int var, int exponent = 1);

  int degree() const { return degree_; }
  int exponent(int var) const;
  const std::vector<std::pair<int, int>>& exponents() const { return exps_; }
  bool is_constant() const { return exps_.empty(); }

  Monomial operator*(const Monomial& other) const;

  // Graded order: lower total degree first; within a degree, the monomial
  // with the larger exponent on the smallest differing variable comes first
  // (so 1 < v1 < v2 < v1^2 < v1*v2 < v2^2).
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exps_ == b.exps_;
  }

  std::string to_string() const;

 private:
  std::vector<std::pair<int, int>> exps_;
  int degree_ = 0;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(double constant);
  Polynomial(const Monomial& m, double coefficient);

  static Polynomial variable(int var) { return {Monomial::variable(var), 1.0}; }

  // Coefficient of m (0 when absent).
  double coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, double coefficient);

  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, double>& terms() const { return terms_; }
  std::vector<int> variables() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scalar) const;
  Polynomial pow(int exponent) const;

  // Deterministic text form, leading (highest graded) term first, e.g.
  // "3*v1^2*v2 - v1 + 5".
  std::string to_string() const;

 private:
  void recompute_degree();

  std::map<Monomial, double> terms_;
  int degree_ = 0;
};

Polynomial multiply(const Polynomial& a, const Polynomial& b);

// Evaluates p at the given assignment. Throws std::out_of_range("unbound
// variable") if p mentions a variable missing from the assignment.
double substitute(const Polynomial& p, const std::map<int, double>& assignment);

// Monomials in a fixed list of variables up to a degree cap, indexed in
// graded order.
class MonomialBasis {
 public:
  static constexpr std::size_t kDefaultCap = 5000;

  MonomialBasis(std::vector<int> variables, int max_degree,
                std::size_t cap = kDefaultCap);

  std::size_t size() const { return monomials_.size(); }
  const Monomial& operator[](std::size_t i) const { return monomials_[i]; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  const std::vector<int>& variables() const { return vars_; }
  int max_degree() const { return max_degree_; }

  // Index of m, or -1 if m is not in the basis.
  long index_of(const Monomial& m) const;

 private:
  std::vector<int> vars_;
  int max_degree_;
  std::vector<Monomial> monomials_;
  std::map<Monomial, std::size_t> index_;
};

// All monomials in variables 1..num_vars of total degree <= max_degree.
// Throws std::length_error("basis too large") past `cap`.
MonomialBasis enumerate_basis(int num_vars, int max_degree,
                              std::size_t cap = MonomialBasis::kDefaultCap);

// Homogeneous monomials of exactly `degree` in variables 1..num_vars, in
// graded order.
std::vector<Monomial> homogeneous_monomials(int num_vars, int degree);

// Binomial coefficient as double-checked size_t; saturates at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace dpsos::poly

#endif  // DPSOS_POLY_HPP_
