// Copyright 2026 The stochrabi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stochrabi/error.hpp"

namespace stochrabi {

/// Dense polynomial with complex coefficients, ascending degree.
/// The zero polynomial is stored as the single coefficient 0.
class Polynomial {
 public:
  using cplx = std::complex<double>;

  Polynomial() : c_{0.0} {}
  Polynomial(std::initializer_list<cplx> c) : c_(c) { normalize(); }
  explicit Polynomial(std::vector<cplx> c) : c_(std::move(c)) { normalize(); }
  // NOLINTNEXTLINE(google-explicit-constructor): constants promote naturally
  Polynomial(cplx constant) : c_{constant} {}
  Polynomial(double constant) : c_{cplx(constant, 0.0)} {}

  /// Monic polynomial with the given roots.
  static Polynomial from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
    Polynomial p(lead);
    for (cplx r : roots) p = p * Polynomial{-r, 1.0};
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == cplx(0.0); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](int k) const { return k <= degree() ? c_[k] : cplx(0.0); }
  cplx leading() const { return c_.back(); }

  /// Largest coefficient magnitude.
  double scale() const {
    double m = 0.0;
    for (cplx x : c_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Copy with coefficients below rel * scale() set to exactly zero.
  Polynomial chopped(double rel) const {
    const double cut = rel * scale();
    std::vector<cplx> c = c_;
    for (cplx& x : c) {
      if (std::abs(x.real()) < cut) x.real(0.0);
      if (std::abs(x.imag()) < cut) x.imag(0.0);
    }
    return Polynomial(std::move(c));
  }

  cplx operator()(cplx s) const {
    cplx acc = c_.back();
    for (int k = degree() - 1; k >= 0; --k) acc = acc * s + c_[k];
    return acc;
  }

  /// sum |c_k| |s|^k, the natural magnitude against which p(s) is small.
  double magnitude_at(cplx s) const {
    const double r = std::abs(s);
    double acc = std::abs(c_.back());
    for (int k = degree() - 1; k >= 0; --k) acc = acc * r + std::abs(c_[k]);
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial(0.0);
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
  }

  /// Coefficients of p(a + x) in powers of x.
  Polynomial shifted(cplx a) const {
    std::vector<cplx> b = c_;
    const int n = degree();
    for (int i = 0; i < n; ++i) {
      for (int k = n - 1; k >= i; --k) b[k] += a * b[k + 1];
    }
    return Polynomial(std::move(b));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + (-1.0) * b;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(cplx a, const Polynomial& p) {
    std::vector<cplx> c = p.c_;
    for (cplx& x : c) x *= a;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(double a, const Polynomial& p) { return cplx(a, 0.0) * p; }

  /// Quotient and remainder of long division by `d`.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    if (d.is_zero()) throw DomainError("Polynomial::divmod: division by zero polynomial");
    if (degree() < d.degree()) return {Polynomial(0.0), *this};
    std::vector<cplx> r = c_;
    const int dn = d.degree();
    std::vector<cplx> q(static_cast<std::size_t>(degree() - dn + 1), 0.0);
    for (int k = degree() - dn; k >= 0; --k) {
      const cplx f = r[k + dn] / d.leading();
      q[k] = f;
      for (int j = 0; j <= dn; ++j) r[k + j] -= f * d.c_[j];
    }
    r.resize(static_cast<std::size_t>(std::max(dn, 1)));
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
  }

  /// Divide by (s - r) assuming r is a root; the remainder is dropped.
  Polynomial deflate(cplx r) const {
    const int n = degree();
    if (n < 1) throw DomainError("Polynomial::deflate: constant polynomial");
    std::vector<cplx> q(static_cast<std::size_t>(n));
    cplx acc = c_[n];
    for (int k = n - 1; k >= 0; --k) {
      q[k] = acc;
      acc = acc * r + c_[k];
    }
    return Polynomial(std::move(q));
  }

  /// Roots as eigenvalues of the companion matrix, refined by Newton
  /// steps on the original polynomial. Exact zero roots are split off first.
  std::vector<cplx> roots() const {
    if (is_zero()) throw DomainError("Polynomial::roots: zero polynomial");
    std::vector<cplx> out;
    std::size_t lo = 0;
    while (lo < c_.size() - 1 && c_[lo] == cplx(0.0)) {
      out.push_back(0.0);
      ++lo;
    }
    const int n = degree() - static_cast<int>(lo);
    if (n == 0) return out;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    const cplx lead = c_.back();
    for (int k = 0; k < n; ++k) comp(0, k) = -c_[lo + n - 1 - k] / lead;
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) {
      throw NumericalError("Polynomial::roots: companion eigen-solver did not converge");
    }
    const Polynomial d = derivative();
    for (int k = 0; k < n; ++k) {
      cplx z = es.eigenvalues()(k);
      // A couple of Newton steps, kept only when they reduce the residual.
      for (int it = 0; it < 3; ++it) {
        const cplx dz = d(z);
        if (dz == cplx(0.0)) break;
        const cplx z1 = z - (*this)(z) / dz;
        if (!(std::abs((*this)(z1)) < std::abs((*this)(z)))) break;
        z = z1;
      }
      out.push_back(z);
    }
    return out;
  }

 private:
  void normalize() {
    if (c_.empty()) c_.push_back(0.0);
    while (c_.size() > 1 && c_.back() == cplx(0.0)) c_.pop_back();
  }

  std::vector<cplx> c_;
};

}  // namespace stochrabi
