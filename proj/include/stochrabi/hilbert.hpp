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

// Hilbert-space primitives for the three-level system: levels 1 and 2 are
// coherently coupled by the static Hamiltonian, level 3 is reached only
// through instantaneous pulses exp(-i theta S), S = |2><3| + |3><2|.
//
// Level k of the physical model is matrix index k-1 throughout.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "stochrabi/error.hpp"

namespace stochrabi {

using cplx = std::complex<double>;
using Matrix3c = Eigen::Matrix<cplx, 3, 3>;
using Vector3c = Eigen::Matrix<cplx, 3, 1>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constants of the model, in units with hbar = 1.
///
/// `delta` couples levels 1 and 2, `deps` is half the 1-2 energy gap and
/// `lambda` is the mean pulse rate. The mean energy of levels 1 and 2 is a
/// global phase and is not represented.
class SystemParams {
 public:
  SystemParams() = default;

  SystemParams(double delta, double deps, double lambda)
      : delta_(delta), deps_(deps), lambda_(lambda) {
    if (!std::isfinite(delta) || !std::isfinite(deps)) {
      throw DomainError("SystemParams: delta and deps must be finite");
    }
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw DomainError("SystemParams: lambda must be finite and >= 0, got " +
                        std::to_string(lambda));
    }
  }

  /// Build from level energies: deps = (eps1 - eps2) / 2; the mean
  /// (eps1 + eps2) / 2 is discarded.
  static SystemParams from_energies(double eps1, double eps2, double delta,
                                    double lambda) {
    return {delta, 0.5 * (eps1 - eps2), lambda};
  }

  double delta() const { return delta_; }
  double deps() const { return deps_; }
  double lambda() const { return lambda_; }

  /// Rabi half-frequency sqrt(deps^2 + delta^2).
  double omega() const { return std::hypot(deps_, delta_); }

  SystemParams with_lambda(double lambda) const {
    return {delta_, deps_, lambda};
  }
  SystemParams with_delta(double delta) const {
    return {delta, deps_, lambda_};
  }

 private:
  double delta_ = 0.0;
  double deps_ = 0.0;
  double lambda_ = 0.0;
};

/// Dimensionless pulse strength, reduced into [0, 2 pi).
class PulseStrength {
 public:
  PulseStrength() = default;
  explicit PulseStrength(double theta) {
    if (!std::isfinite(theta)) {
      throw DomainError("PulseStrength: theta must be finite");
    }
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    theta_ = r;
  }
  double value() const { return theta_; }

 private:
  double theta_ = 0.0;
};

/// Diagnostics for the three density-matrix invariants.
struct DensityDiagnostics {
  double hermiticity_error = 0.0;  // max |rho_ij - conj(rho_ji)|
  double trace_error = 0.0;        // |tr(rho) - 1|
  double min_eigenvalue = 0.0;     // of the Hermitian part

  bool ok(double herm_tol = 1e-12, double trace_tol = 1e-12,
          double psd_tol = 1e-10) const {
    return hermiticity_error <= herm_tol && trace_error <= trace_tol &&
           min_eigenvalue >= -psd_tol;
  }
};

/// 3x3 density operator. Construction does not validate; call
/// `diagnostics()` or `is_valid()` to check the invariants.
class DensityMatrix {
 public:
  DensityMatrix() : m_(Matrix3c::Zero()) {}
  explicit DensityMatrix(const Matrix3c& m) : m_(m) {}

  /// |k><k| for matrix index k in {0, 1, 2}.
  static DensityMatrix pure_level(int k) {
    Matrix3c m = Matrix3c::Zero();
    m(k, k) = 1.0;
    return DensityMatrix(m);
  }
  static DensityMatrix from_state(const Vector3c& psi) {
    return DensityMatrix(psi * psi.adjoint());
  }
  static DensityMatrix maximally_mixed() {
    return DensityMatrix(Matrix3c::Identity() / 3.0);
  }

  const Matrix3c& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  /// Population of matrix index k.
  double population(int k) const { return m_(k, k).real(); }
  double purity() const { return (m_ * m_).trace().real(); }

  DensityDiagnostics diagnostics() const {
    DensityDiagnostics d;
    d.hermiticity_error = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(m_.trace() - 1.0);
    Matrix3c herm = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
  }
  bool is_valid() const { return diagnostics().ok(); }

 private:
  Matrix3c m_;
};

/// Static Hamiltonian [[deps, delta, 0], [delta, -deps, 0], [0, 0, 0]].
inline Matrix3c build_h0(const SystemParams& p) {
  Matrix3c h = Matrix3c::Zero();
  h(0, 0) = p.deps();
  h(1, 1) = -p.deps();
  h(0, 1) = p.delta();
  h(1, 0) = p.delta();
  return h;
}

/// exp(-i H0 tau) in closed form. On levels {1,2}:
/// cos(w tau) I - i sin(w tau) (deps sz + delta sx) / w; level 3 is inert.
inline Matrix3c unitary_propagator(const SystemParams& p, double tau) {
  if (!std::isfinite(tau)) {
    throw DomainError("unitary_propagator: tau must be finite");
  }
  Matrix3c u = Matrix3c::Identity();
  const double w = p.omega();
  if (w == 0.0) return u;
  const double c = std::cos(w * tau);
  const double s = std::sin(w * tau) / w;
  const cplx mi(0.0, -1.0);
  u(0, 0) = cplx(c, -s * p.deps());
  u(1, 1) = cplx(c, s * p.deps());
  u(0, 1) = mi * (s * p.delta());
  u(1, 0) = u(0, 1);
  return u;
}

/// exp(-i theta S) = I - (P2 + P3)(1 - cos theta) - i S sin theta.
inline Matrix3c pulse_operator(PulseStrength theta) {
  const double c = std::cos(theta.value());
  const double s = std::sin(theta.value());
  Matrix3c a = Matrix3c::Zero();
  a(0, 0) = 1.0;
  a(1, 1) = c;
  a(2, 2) = c;
  a(1, 2) = cplx(0.0, -s);
  a(2, 1) = cplx(0.0, -s);
  return a;
}

/// A rho A^dagger with A the pulse operator.
inline DensityMatrix apply_pulse(const DensityMatrix& rho, PulseStrength theta) {
  const Matrix3c a = pulse_operator(theta);
  return DensityMatrix(a * rho.matrix() * a.adjoint());
}

/// U rho U^dagger.
inline DensityMatrix conjugate(const DensityMatrix& rho, const Matrix3c& u) {
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

}  // namespace stochrabi
