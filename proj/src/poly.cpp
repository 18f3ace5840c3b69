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

#include "dpsos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dpsos::poly {

Monomial::Monomial(std::vector<std::pair<int, int>> exponents) {
  std::sort(exponents.begin(), exponents.end());
  for (const auto& [var, e] : exponents) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e == 0) continue;
    if (!exps_.empty() && exps_.back().first == var) {
      exps_.back().second += e;
    } else {
      exps_.emplace_back(var, e);
    }
    degree_ += e;
  }
}

Monomial Monomial::variable(int var, int exponent) {
  return Monomial({{var, exponent}});
}

int Monomial::exponent(int var) const {
  auto it = std::lower_bound(exps_.begin(), exps_.end(), std::make_pair(var, 0));
  return (it != exps_.end() && it->first == var) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.exps_.reserve(exps_.size() + other.exps_.size());
  auto a = exps_.begin();
  auto b = other.exps_.begin();
  while (a != exps_.end() || b != other.exps_.end()) {
    if (b == other.exps_.end() || (a != exps_.end() && a->first < b->first)) {
      out.exps_.push_back(*a++);
    } else if (a == exps_.end() || b->first < a->first) {
      out.exps_.push_back(*b++);
    } else {
      out.exps_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.degree_ = degree_ + other.degree_;
  return out;
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  auto ia = a.exps_.begin();
  auto ib = b.exps_.begin();
  while (ia != a.exps_.end() && ib != b.exps_.end()) {
    if (ia->first != ib->first) {
      // The monomial touching the smaller variable has the larger exponent
      // there.
      return ia->first < ib->first;
    }
    if (ia->second != ib->second) return ia->second > ib->second;
    ++ia;
    ++ib;
  }
  return false;
}

std::string Monomial::to_string() const {
  if (exps_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, e] : exps_) {
    if (!first) os << '*';
    first = false;
    os << 'v' << var;
    if (e > 1) os << '^' << e;
  }
  return os.str();
}

Polynomial::Polynomial(double constant) {
  if (constant != 0.0) terms_.emplace(Monomial(), constant);
}

Polynomial::Polynomial(const Monomial& m, double coefficient) {
  if (coefficient != 0.0) terms_.emplace(m, coefficient);
  degree_ = terms_.empty() ? 0 : m.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double coefficient) {
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) {
      terms_.erase(it);
      recompute_degree();
      return;
    }
  }
  degree_ = std::max(degree_, m.degree());
}

std::vector<int> Polynomial::variables() const {
  std::vector<int> vars;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.exponents()) vars.push_back(v);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

void Polynomial::recompute_degree() {
  degree_ = terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  Polynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Polynomial Polynomial::operator*(double scalar) const {
  if (scalar == 0.0) return Polynomial();
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c *= scalar;
  return out;
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw std::invalid_argument("negative power");
  Polynomial out(1.0);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) out = out * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    double mag = std::abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (m.is_constant()) {
      os << mag;
    } else {
      if (mag != 1.0) os << mag << '*';
      os << m.to_string();
    }
  }
  return os.str();
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) { return a * b; }

double substitute(const Polynomial& p, const std::map<int, double>& assignment) {
  double total = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c;
    for (const auto& [var, e] : m.exponents()) {
      auto it = assignment.find(var);
      if (it == assignment.end()) throw std::out_of_range("unbound variable");
      term *= std::pow(it->second, e);
    }
    total += term;
  }
  return total;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    std::size_t num = n - k + i;
    if (r > std::numeric_limits<std::size_t>::max() / num) {
      return std::numeric_limits<std::size_t>::max();
    }
    r = r * num / i;
  }
  return r;
}

namespace {

// Appends all exponent vectors of total `degree` over `vars` in graded order
// (larger exponent on earlier variables first).
void homogeneous(const std::vector<int>& vars, int degree,
                 std::vector<Monomial>& out) {
  std::vector<int> e(vars.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == vars.size()) {
      e[pos] = left;
      std::vector<std::pair<int, int>> pairs;
      for (std::size_t i = 0; i < vars.size(); ++i) pairs.emplace_back(vars[i], e[i]);
      out.emplace_back(std::move(pairs));
      return;
    }
    for (int x = left; x >= 0; --x) {
      e[pos] = x;
      rec(pos + 1, left - x);
    }
  };
  if (vars.empty()) {
    if (degree == 0) out.emplace_back();
    return;
  }
  rec(0, degree);
}

}  // namespace

MonomialBasis::MonomialBasis(std::vector<int> variables, int max_degree,
                             std::size_t cap)
    : vars_(std::move(variables)), max_degree_(max_degree) {
  if (vars_.empty()) throw std::invalid_argument("basis needs >= 1 variable");
  if (max_degree < 0) throw std::invalid_argument("negative degree");
  std::sort(vars_.begin(), vars_.end());
  if (binomial(vars_.size() + max_degree, max_degree) > cap) {
    throw std::length_error("basis too large");
  }
  for (int deg = 0; deg <= max_degree; ++deg) homogeneous(vars_, deg, monomials_);
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], i);
}

long MonomialBasis::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

MonomialBasis enumerate_basis(int num_vars, int max_degree, std::size_t cap) {
  if (num_vars < 1) throw std::invalid_argument("num_vars must be >= 1");
  std::vector<int> vars(num_vars);
  for (int i = 0; i < num_vars; ++i) vars[i] = i + 1;
  return MonomialBasis(std::move(vars), max_degree, cap);
}

std::vector<Monomial> homogeneous_monomials(int num_vars, int degree) {
  std::vector<int> vars(num_vars);
  for (int i = 0; i < num_vars; ++i) vars[i] = i + 1;
  std::vector<Monomial> out;
  homogeneous(vars, degree, out);
  return out;
}

}  // namespace dpsos::poly
