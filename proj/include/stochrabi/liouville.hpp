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

// Liouville-space algebra over 3x3 density matrices. Superoperators are 9x9
// matrices in the fixed pair ordering
//
//   (11) (22) (12) (21) (33) (13) (23) (31) (32)
//
// which groups the populations/1-2 coherences, level-3 population, and the
// two level-3 coherence blocks.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"

namespace stochrabi::liouville {

using Vector9c = Eigen::Matrix<cplx, 9, 1>;
using Matrix9c = Eigen::Matrix<cplx, 9, 9>;

/// Bijection between level pairs (m1, m2) (matrix indices 0..2) and the
/// nine Liouville positions.
struct LiouvilleBasis {
  static constexpr std::array<std::pair<int, int>, 9> kOrder{{
      {0, 0}, {1, 1}, {0, 1}, {1, 0}, {2, 2}, {0, 2}, {1, 2}, {2, 0}, {2, 1}}};

  static constexpr int position(int m1, int m2) {
    constexpr std::array<std::array<int, 3>, 3> table{{
        {0, 2, 5},
        {3, 1, 6},
        {7, 8, 4}}};
    return table[m1][m2];
  }
  static constexpr std::pair<int, int> pair(int pos) { return kOrder[pos]; }
};

/// 9x9 superoperator in LiouvilleBasis ordering.
class SuperOp {
 public:
  SuperOp() : m_(Matrix9c::Zero()) {}
  explicit SuperOp(const Matrix9c& m) : m_(m) {}

  static SuperOp identity() { return SuperOp(Matrix9c::Identity()); }

  const Matrix9c& matrix() const { return m_; }
  Matrix9c& matrix() { return m_; }

  /// Element (m1 m2 | X | m3 m4).
  cplx operator()(int m1, int m2, int m3, int m4) const {
    return m_(LiouvilleBasis::position(m1, m2), LiouvilleBasis::position(m3, m4));
  }
  cplx& operator()(int m1, int m2, int m3, int m4) {
    return m_(LiouvilleBasis::position(m1, m2), LiouvilleBasis::position(m3, m4));
  }

  Vector9c operator*(const Vector9c& v) const { return m_ * v; }
  SuperOp operator*(const SuperOp& o) const { return SuperOp(m_ * o.m_); }
  SuperOp operator+(const SuperOp& o) const { return SuperOp(m_ + o.m_); }
  SuperOp operator-(const SuperOp& o) const { return SuperOp(m_ - o.m_); }
  friend SuperOp operator*(cplx a, const SuperOp& o) { return SuperOp(a * o.m_); }

 private:
  Matrix9c m_;
};

inline Vector9c vectorize(const Matrix3c& rho) {
  Vector9c v;
  for (int k = 0; k < 9; ++k) {
    const auto [a, b] = LiouvilleBasis::pair(k);
    v(k) = rho(a, b);
  }
  return v;
}
inline Vector9c vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

inline DensityMatrix devectorize(const Vector9c& v) {
  Matrix3c m;
  for (int k = 0; k < 9; ++k) {
    const auto [a, b] = LiouvilleBasis::pair(k);
    m(a, b) = v(k);
  }
  return DensityMatrix(m);
}

/// Superoperator of rho -> A rho B:
/// (m1 m2 | X | m3 m4) = <m1|A|m3> <m4|B|m2>.
inline SuperOp conjugation_superop(const Matrix3c& a, const Matrix3c& b) {
  SuperOp x;
  for (int i = 0; i < 9; ++i) {
    const auto [m1, m2] = LiouvilleBasis::pair(i);
    for (int j = 0; j < 9; ++j) {
      const auto [m3, m4] = LiouvilleBasis::pair(j);
      x.matrix()(i, j) = a(m1, m3) * b(m4, m2);
    }
  }
  return x;
}

/// Commutator superoperator H0^x: rho -> [H0, rho].
inline SuperOp h0_cross(const SystemParams& p) {
  const Matrix3c h = build_h0(p);
  SuperOp x;
  for (int i = 0; i < 9; ++i) {
    const auto [m1, m2] = LiouvilleBasis::pair(i);
    for (int j = 0; j < 9; ++j) {
      const auto [m3, m4] = LiouvilleBasis::pair(j);
      cplx e = 0.0;
      if (m2 == m4) e += h(m1, m3);
      if (m1 == m3) e -= h(m4, m2);
      x.matrix()(i, j) = e;
    }
  }
  return x;
}

/// Part of the averaged pulse map that leaves level 1 alone: (11|T1|11) = 1.
inline SuperOp t_one() {
  SuperOp t;
  t(0, 0, 0, 0) = 1.0;
  return t;
}

/// Part of the averaged pulse map acting on the {2,3} sector: eight entries
/// equal to 1/2 on (22),(33) and on (23),(32).
inline SuperOp delta_t() {
  SuperOp t;
  for (auto [a, b] : {std::pair{1, 1}, std::pair{2, 2}}) {
    for (auto [c, d] : {std::pair{1, 1}, std::pair{2, 2}}) t(a, b, c, d) = 0.5;
  }
  for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 1}}) {
    for (auto [c, d] : {std::pair{1, 2}, std::pair{2, 1}}) t(a, b, c, d) = 0.5;
  }
  return t;
}

/// Pulse conjugation map averaged over theta uniform in [0, 2 pi).
inline SuperOp t_averaged() { return t_one() + delta_t(); }

/// Generator L = -i H0^x + lambda ((T)_av - I) of the averaged dynamics.
class Generator {
 public:
  explicit Generator(const SystemParams& p)
      : params_(p),
        op_(cplx(0.0, -1.0) * h0_cross(p) +
            cplx(p.lambda(), 0.0) * (t_averaged() - SuperOp::identity())) {}

  const SuperOp& superop() const { return op_; }
  const Matrix9c& matrix() const { return op_.matrix(); }
  const SystemParams& params() const { return params_; }

 private:
  SystemParams params_;
  SuperOp op_;
};

inline Generator generator(const SystemParams& p) { return Generator(p); }

/// Row functional sum of the (11), (22), (33) positions: the trace.
inline Eigen::Matrix<cplx, 1, 9> trace_functional() {
  Eigen::Matrix<cplx, 1, 9> r = Eigen::Matrix<cplx, 1, 9>::Zero();
  r(LiouvilleBasis::position(0, 0)) = 1.0;
  r(LiouvilleBasis::position(1, 1)) = 1.0;
  r(LiouvilleBasis::position(2, 2)) = 1.0;
  return r;
}

/// exp(L t) for a fixed generator, evaluated at any number of times.
///
/// Uses the eigendecomposition L = V D V^-1 when cond(V) <= 1e8 and falls
/// back to scaling-and-squaring Pade otherwise.
class Propagator {
 public:
  static constexpr double kMaxEigenvectorCondition = 1e8;

  explicit Propagator(const Generator& gen) : l_(gen.matrix()) {
    Eigen::ComplexEigenSolver<Matrix9c> es(l_);
    if (es.info() != Eigen::Success) {
      use_eigen_ = false;
      return;
    }
    v_ = es.eigenvectors();
    d_ = es.eigenvalues();
    Eigen::JacobiSVD<Matrix9c> svd(v_);
    const auto& sv = svd.singularValues();
    condition_ = sv(0) / sv(8);
    if (!(condition_ <= kMaxEigenvectorCondition)) {
      use_eigen_ = false;
      return;
    }
    v_inv_ = v_.inverse();
  }

  bool uses_eigendecomposition() const { return use_eigen_; }
  double eigenvector_condition() const { return condition_; }

  Matrix9c exp(double t) const {
    Matrix9c out;
    if (use_eigen_) {
      Vector9c e;
      for (int k = 0; k < 9; ++k) e(k) = std::exp(d_(k) * t);
      out = v_ * e.asDiagonal() * v_inv_;
    } else {
      Matrix9c lt = l_ * cplx(t, 0.0);
      out = lt.exp();
    }
    if (!out.allFinite()) {
      throw NumericalError("Propagator: matrix exponential did not produce a finite result");
    }
    return out;
  }

  Vector9c apply(const Vector9c& v0, double t) const { return exp(t) * v0; }

 private:
  Matrix9c l_;
  Matrix9c v_;
  Matrix9c v_inv_;
  Vector9c d_;
  double condition_ = std::numeric_limits<double>::infinity();
  bool use_eigen_ = true;
};

/// Averaged density matrix rho(t) = devec(exp(L t) vec(rho0)) on a grid.
inline std::vector<DensityMatrix> propagate(const DensityMatrix& rho0,
                                            const SystemParams& p,
                                            std::span<const double> t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i])) {
      throw DomainError("propagate: times must be finite and nonnegative");
    }
    if (i > 0 && t_grid[i] < t_grid[i - 1]) {
      throw DomainError("propagate: time grid must be sorted");
    }
  }
  const Propagator prop(generator(p));
  const Vector9c v0 = vectorize(rho0);
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(devectorize(prop.apply(v0, t)));
  return out;
}

inline void require_unique_stationary(const SystemParams& p, const char* who) {
  if (p.lambda() <= 0.0) {
    throw DomainError(std::string(who) +
                      ": lambda must be > 0 (without pulses the dynamics is purely oscillatory)");
  }
  if (p.delta() == 0.0) {
    throw DomainError(std::string(who) +
                      ": delta must be nonzero (level 1 is frozen and the fixed point is not unique)");
  }
}

/// Eigenvalues of the generator, sorted by decreasing real part (ties by
/// decreasing imaginary part). Real parts are compared after rounding to
/// 1e-12 of the spectral scale, so conjugate partners tie.
inline std::vector<cplx> generator_spectrum(const SystemParams& p) {
  Eigen::ComplexEigenSolver<Matrix9c> es(generator(p).matrix(), false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("generator_spectrum: eigen-solver did not converge");
  }
  std::vector<cplx> ev(9);
  for (int k = 0; k < 9; ++k) ev[k] = es.eigenvalues()(k);
  double scale = 1.0;
  for (cplx z : ev) scale = std::max(scale, std::abs(z));
  const double quantum = 1e-12 * scale;
  const auto key = [quantum](cplx z) { return std::round(z.real() / quantum); };
  std::sort(ev.begin(), ev.end(), [&key](cplx a, cplx b) {
    if (key(a) != key(b)) return key(a) > key(b);
    return a.imag() > b.imag();
  });
  return ev;
}

/// Kernel of the generator normalized to unit trace. Requires lambda > 0
/// and delta != 0 so the zero eigenvalue is simple.
inline DensityMatrix stationary_state(const SystemParams& p) {
  require_unique_stationary(p, "stationary_state");
  Eigen::ComplexEigenSolver<Matrix9c> es(generator(p).matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalError("stationary_state: eigen-solver did not converge");
  }
  int best = 0;
  for (int k = 1; k < 9; ++k) {
    if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
  }
  Vector9c v = es.eigenvectors().col(best);
  const cplx tr = (trace_functional() * v)(0);
  if (std::abs(tr) < 1e-14) {
    throw NumericalError("stationary_state: null vector has zero trace");
  }
  return devectorize(v / tr);
}

/// Nonzero generator eigenvalue with the largest real part. Of a conjugate
/// pair, the member with positive imaginary part is returned.
inline cplx slowest_mode(const SystemParams& p) {
  require_unique_stationary(p, "slowest_mode");
  const auto ev = generator_spectrum(p);
  // Tolerance separating the simple zero eigenvalue from the decaying modes.
  const double zero_tol = 1e-9 * std::max(1.0, std::abs(ev.back()));
  for (cplx z : ev) {
    // The generator is real, so the conjugate is also an eigenvalue.
    if (std::abs(z) > zero_tol) return {z.real(), std::abs(z.imag())};
  }
  throw NumericalError("slowest_mode: no nonzero eigenvalue found");
}

}  // namespace stochrabi::liouville
