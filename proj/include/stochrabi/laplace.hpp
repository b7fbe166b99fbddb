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

// Laplace-domain stay-put probability.
//
// The averaged resolvent U(s) = [(s+lambda) I + i H0^x - lambda (T)_av]^-1
// is split as U0 = [(s+lambda) I + i H0^x - lambda T1]^-1 plus a geometric
// series in the {2,3}-sector part of the pulse map. Only four elements of
// the free resolvent G = [(s+lambda) I + i H0^x]^-1 are needed, all known in
// closed form, and P1(s) = (11|U(s)|11) follows by resummation.
//
// Two independent routes to the time domain are provided: exact pole/residue
// expansion of the rational P1(s), and Talbot contour quadrature.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"
#include "stochrabi/liouville.hpp"
#include "stochrabi/polynomial.hpp"

namespace stochrabi::laplace {

/// Relative cancellation below which a denominator is treated as a pole.
inline constexpr double kPoleGuard = 1e-13;

namespace detail {

inline cplx guarded_div(cplx num, cplx den, double den_magnitude, const char* who) {
  if (!(std::abs(den) > kPoleGuard * den_magnitude)) {
    throw DomainError(std::string(who) + ": evaluation at a pole");
  }
  return num / den;
}

}  // namespace detail

/// Superoperator matrix elements addressed by level pairs, (ab|X|cd).
enum class Element { e11_11, e11_22, e22_11, e22_22, e33_33 };

/// Closed-form element of the free resolvent G(s). Only the four elements
/// coupling (11) and (22) are available; e33_33 is rejected.
inline cplx g_element(Element which, const SystemParams& p, cplx s) {
  const cplx q = s + p.lambda();
  const double w2 = p.omega() * p.omega();
  const double d2 = p.delta() * p.delta();
  const double e2 = p.deps() * p.deps();
  const cplx den = q * (q * q + 4.0 * w2);
  const double den_mag = std::abs(q) * (std::norm(q) + 4.0 * w2);
  switch (which) {
    case Element::e11_11:
    case Element::e22_22:
      return detail::guarded_div(q * q + 2.0 * (w2 + e2), den, den_mag, "g_element");
    case Element::e11_22:
    case Element::e22_11:
      if (d2 == 0.0) return 0.0;
      return detail::guarded_div(2.0 * d2, den, den_mag, "g_element");
    case Element::e33_33:
      break;
  }
  throw DomainError("g_element: only (11|11), (11|22), (22|11), (22|22) are provided");
}

/// Element of U0(s): G resummed over the level-1 part of the pulse map.
inline cplx u0_element(Element which, const SystemParams& p, cplx s) {
  const double lam = p.lambda();
  if (which == Element::e33_33) {
    const cplx q = s + lam;
    return detail::guarded_div(1.0, q, std::abs(s) + lam, "u0_element");
  }
  const cplx g11 = g_element(Element::e11_11, p, s);
  const cplx x = 1.0 - lam * g11;
  const double x_mag = 1.0 + lam * std::abs(g11);
  switch (which) {
    case Element::e11_11:
      return detail::guarded_div(g11, x, x_mag, "u0_element");
    case Element::e11_22:
    case Element::e22_11:
      return detail::guarded_div(g_element(which, p, s), x, x_mag, "u0_element");
    case Element::e22_22: {
      const cplx g12 = g_element(Element::e11_22, p, s);
      return g11 + lam * detail::guarded_div(g12 * g12, x, x_mag, "u0_element");
    }
    case Element::e33_33:
      break;
  }
  throw DomainError("u0_element: unknown element");
}

/// P1(s) = (11|U0|11) + (lambda/2)(11|U0|22)(22|U0|11) /
///         [1 - (lambda/2)((22|U0|22) + 1/(s+lambda))].
inline cplx p1_laplace(const SystemParams& p, cplx s) {
  const double half = 0.5 * p.lambda();
  const cplx u11 = u0_element(Element::e11_11, p, s);
  if (half == 0.0) return u11;
  const cplx u12 = u0_element(Element::e11_22, p, s);
  const cplx u21 = u0_element(Element::e22_11, p, s);
  const cplx u22 = u0_element(Element::e22_22, p, s);
  const cplx u33 = u0_element(Element::e33_33, p, s);
  const cplx bracket = 1.0 - half * (u22 + u33);
  const double bracket_mag = 1.0 + half * (std::abs(u22) + std::abs(u33));
  return u11 + half * u12 * detail::guarded_div(u21, bracket, bracket_mag, "p1_laplace");
}

/// Level-3 population transform. Pulses feed level 3 from the {22, 33}
/// populations at rate lambda/2 each, and trace conservation gives
/// P2(s) + P3(s) = 1/s - P1(s), so P3(s) = (lambda/2)/(s+lambda) (1/s - P1(s)).
inline cplx p3_laplace(const SystemParams& p, cplx s) {
  if (p.lambda() == 0.0) return 0.0;
  const cplx inv_s = detail::guarded_div(1.0, s, 1.0, "p3_laplace");
  const cplx u33 = u0_element(Element::e33_33, p, s);
  return 0.5 * p.lambda() * u33 * (inv_s - p1_laplace(p, s));
}

/// (s+lambda) I + i H0^x - lambda (T)_av, the inverse averaged resolvent.
inline liouville::Matrix9c resolvent_matrix(const SystemParams& p, cplx s) {
  using liouville::Matrix9c;
  return (s + p.lambda()) * Matrix9c::Identity() +
         cplx(0.0, 1.0) * liouville::h0_cross(p).matrix() -
         p.lambda() * liouville::t_averaged().matrix();
}

/// Full averaged resolvent applied to rho(0) = |1><1|, by a dense 9x9 solve.
inline liouville::Vector9c resolvent_solve(const SystemParams& p, cplx s) {
  const liouville::Matrix9c m = resolvent_matrix(p, s);
  Eigen::PartialPivLU<liouville::Matrix9c> lu(m);
  if (!(lu.rcond() > 1e-14)) {
    throw NumericalError("resolvent_p1: singular resolvent at this s");
  }
  return lu.solve(liouville::vectorize(DensityMatrix::pure_level(0)));
}

/// (11|U(s)|11) from the dense solve; independent of the resummation.
inline cplx resolvent_p1(const SystemParams& p, cplx s) {
  return resolvent_solve(p, s)(liouville::LiouvilleBasis::position(0, 0));
}

/// Ratio of complex polynomials in s, kept strictly proper.
class RationalLaplaceFn {
 public:
  RationalLaplaceFn() : num_(0.0), den_(1.0) {}
  RationalLaplaceFn(Polynomial num, Polynomial den)
      : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("RationalLaplaceFn: zero denominator");
    if (!num_.is_zero() && num_.degree() >= den_.degree()) {
      throw DomainError("RationalLaplaceFn: transform must be strictly proper");
    }
    const cplx lead = den_.leading();
    num_ = (1.0 / lead) * num_;
    den_ = (1.0 / lead) * den_;
  }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  cplx operator()(cplx s) const {
    return detail::guarded_div(num_(s), den_(s), den_.magnitude_at(s), "RationalLaplaceFn");
  }

  /// Cancel factors (s - r) for every denominator root r at which the
  /// numerator vanishes to `tol` relative to its natural magnitude.
  RationalLaplaceFn reduced(double tol = 1e-10) const {
    if (num_.is_zero()) return {Polynomial(0.0), Polynomial(1.0)};
    Polynomial n = num_;
    Polynomial d = den_;
    bool changed = true;
    while (changed && n.degree() > 0 && d.degree() > 0) {
      changed = false;
      for (cplx r : d.roots()) {
        if (std::abs(n(r)) <= tol * n.magnitude_at(r)) {
          n = n.deflate(r);
          d = d.deflate(r);
          changed = true;
          break;
        }
      }
    }
    return {n, d};
  }

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Relative coefficient size treated as rounding noise in the builders.
inline constexpr double kChop = 1e-14;

/// Exact rational form of P1(s), assembled from the closed-form elements.
///
/// With q = s + lambda, D = q (q^2 + 4 w^2), N = q^2 + 2 (w^2 + deps^2),
/// Q = D - lambda N and A = 2 q D - lambda q N - lambda D:
///   P1 = [N A + 4 lambda delta^4 q] / [Q A - 4 lambda^2 delta^4 q].
/// D divides both sides exactly (it is the denominator of (22|U0|22)); any
/// remaining common roots are removed by root coincidence.
inline RationalLaplaceFn build_rational_p1(const SystemParams& p) {
  const double lam = p.lambda();
  const double w2 = p.omega() * p.omega();
  const double e2 = p.deps() * p.deps();
  const double d4 = std::pow(p.delta(), 4);
  const Polynomial q{lam, 1.0};
  const Polynomial dd = q * (q * q + Polynomial(4.0 * w2));
  const Polynomial nn = q * q + Polynomial(2.0 * (w2 + e2));
  const Polynomial qq = dd - lam * nn;
  const Polynomial aa = 2.0 * q * dd - lam * q * nn - lam * dd;
  const Polynomial num = nn * aa + (4.0 * lam * d4) * q;
  const Polynomial den = qq * aa - (4.0 * lam * lam * d4) * q;

  const auto [nq, nr] = num.divmod(dd);
  const auto [dq, dr] = den.divmod(dd);
  const double eps = 1e-12;
  if (nr.scale() > eps * std::max(1.0, num.scale()) ||
      dr.scale() > eps * std::max(1.0, den.scale())) {
    throw NumericalError("build_rational_p1: structural factor did not divide exactly");
  }
  // Coefficients at the rounding level of the division are dropped so that
  // exact structural zeros (Delta = 0, lambda = 0) cancel cleanly.
  return RationalLaplaceFn(nq.chopped(kChop), dq.chopped(kChop)).reduced();
}

/// P3(s) = (lambda/2) (1/s - P1(s)) / (s + lambda) from the rational P1.
inline RationalLaplaceFn build_rational_p3(const SystemParams& p,
                                           const RationalLaplaceFn& p1) {
  if (p.lambda() == 0.0) return {};
  const Polynomial s{0.0, 1.0};
  const Polynomial q{p.lambda(), 1.0};
  const Polynomial num =
      (0.5 * p.lambda()) * (p1.denominator() - s * p1.numerator());
  const Polynomial den = s * q * p1.denominator();
  return RationalLaplaceFn(num.chopped(kChop), den.chopped(kChop)).reduced();
}

/// Partial-fraction representation: sum over poles p of
/// sum_k c_k / (s - p)^k, inverted as sum c_k t^(k-1)/(k-1)! e^(p t).
struct PoleResidueForm {
  struct Pole {
    cplx location;
    int multiplicity = 1;
    std::vector<cplx> coeffs;  // coeffs[k-1] multiplies 1/(s - p)^k
  };
  std::vector<Pole> poles;

  cplx evaluate_complex(double t) const {
    cplx acc = 0.0;
    for (const Pole& pl : poles) {
      const cplx e = std::exp(pl.location * t);
      cplx poly = 0.0;
      double tk = 1.0;
      for (std::size_t k = 0; k < pl.coeffs.size(); ++k) {
        poly += pl.coeffs[k] * tk;
        tk *= t / static_cast<double>(k + 1);
      }
      acc += poly * e;
    }
    return acc;
  }
};

/// Root clustering thresholds used by `pole_residues`.
struct ResidueOptions {
  double cluster_radius = 1e-4;       // candidate multiple-pole grouping
  double coincidence = 1e-8;          // clusters tighter than this must divide exactly
  double divisibility = 1e-13;        // relative remainder accepted as exact
  double stability = 1e-10;           // largest admissible pole real part
};

namespace detail {

/// Taylor coefficients a_0..a_{m-1} of n(p + x) / h(p + x).
inline std::vector<cplx> series_ratio(const Polynomial& n, const Polynomial& h, cplx p, int m) {
  const Polynomial ns = n.shifted(p);
  const Polynomial hs = h.shifted(p);
  if (hs[0] == cplx(0.0)) throw NumericalError("pole_residues: degenerate cofactor");
  std::vector<cplx> a(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    cplx acc = ns[j];
    for (int i = 1; i <= j; ++i) acc -= hs[i] * a[static_cast<std::size_t>(j - i)];
    a[static_cast<std::size_t>(j)] = acc / hs[0];
  }
  return a;
}

}  // namespace detail

inline PoleResidueForm pole_residues(const RationalLaplaceFn& f, ResidueOptions opt = {}) {
  PoleResidueForm out;
  if (f.numerator().is_zero()) return out;
  const Polynomial& num = f.numerator();
  const Polynomial& den = f.denominator();
  const std::vector<cplx> roots = den.roots();
  std::vector<bool> used(roots.size(), false);
  const Polynomial dprime = den.derivative();

  auto add_simple = [&](cplx r) {
    const cplx dp = dprime(r);
    if (dp == cplx(0.0)) throw NumericalError("pole_residues: vanishing derivative at a simple pole");
    out.poles.push_back({r, 1, {num(r) / dp}});
  };

  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    // single-linkage grouping: a multiple root splits into a small ring
    std::vector<cplx> cluster{roots[i]};
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      const double radius = opt.cluster_radius * std::max(1.0, std::abs(cluster[c]));
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (!used[j] && std::abs(roots[j] - cluster[c]) <= radius) {
          cluster.push_back(roots[j]);
          used[j] = true;
        }
      }
    }
    if (cluster.size() == 1) {
      add_simple(roots[i]);
      continue;
    }
    cplx mean = 0.0;
    for (cplx z : cluster) mean += z;
    mean /= static_cast<double>(cluster.size());
    double span = 0.0;
    for (cplx a : cluster) {
      for (cplx b : cluster) span = std::max(span, std::abs(a - b));
    }
    const int m = static_cast<int>(cluster.size());
    // An exact m-fold root is a simple root of the (m-1)th derivative.
    Polynomial dm = den;
    for (int k = 1; k < m; ++k) dm = dm.derivative();
    const Polynomial dm1 = dm.derivative();
    for (int it = 0; it < 20; ++it) {
      const cplx slope = dm1(mean);
      if (slope == cplx(0.0)) break;
      const cplx step = dm(mean) / slope;
      mean -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(mean))) break;
    }
    Polynomial factor(1.0);
    for (int k = 0; k < m; ++k) factor = factor * Polynomial{-mean, 1.0};
    const auto [h, rem] = den.divmod(factor);
    if (rem.scale() <= opt.divisibility * den.scale()) {
      const std::vector<cplx> a = detail::series_ratio(num, h, mean, m);
      PoleResidueForm::Pole pl{mean, m, std::vector<cplx>(static_cast<std::size_t>(m))};
      for (int k = 1; k <= m; ++k) pl.coeffs[static_cast<std::size_t>(k - 1)] = a[static_cast<std::size_t>(m - k)];
      out.poles.push_back(std::move(pl));
    } else if (span < opt.coincidence * std::max(1.0, std::abs(mean))) {
      throw NumericalError(
          "invert_residues: pole cluster tighter than 1e-8 is not an exact multiple pole; "
          "residue extraction is ill-conditioned, use invert_talbot instead");
    } else {
      for (cplx z : cluster) add_simple(z);
    }
  }
  for (const auto& pl : out.poles) {
    if (pl.location.real() > opt.stability) {
      throw DomainError("invert_residues: pole with positive real part " +
                        std::to_string(pl.location.real()));
    }
  }
  return out;
}

/// Inverse transform of a strictly proper rational function on a time grid.
inline std::vector<double> invert_residues(const PoleResidueForm& form, std::span<const double> t_grid) {
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw DomainError("invert_residues: non-finite time");
    const cplx v = form.evaluate_complex(t);
    if (std::abs(v.imag()) >= 1e-9) {
      throw NumericalError("invert_residues: residue sum is not real (imaginary part " +
                           std::to_string(v.imag()) + ")");
    }
    out.push_back(v.real());
  }
  return out;
}

inline std::vector<double> invert_residues(const RationalLaplaceFn& f, std::span<const double> t_grid,
                                           ResidueOptions opt = {}) {
  return invert_residues(pole_residues(f, opt), t_grid);
}

/// Talbot contour settings.
///
/// The contour is z(th) = abscissa + mu (a th cot(b th) - c + i nu g th),
/// th in (-pi, pi), with mu = scale / t. The shape constants are the
/// Weideman-Trefethen optimum for real singularities; `nu` stretches the
/// imaginary extent so that singularities with |Im| <= singularity_bound
/// stay well inside. `nodes` is the minimum number of midpoint nodes; it is
/// raised automatically when the stretched contour needs more to resolve the
/// oscillation of exp(z t).
struct TalbotOptions {
  int nodes = 64;
  double singularity_bound = 0.0;
  double abscissa = 0.0;
  double scale = 32.0;
};

/// Node count actually used for time t.
inline int talbot_node_count(double t, const TalbotOptions& opt) {
  constexpr double kImag = 0.2645;
  constexpr double kCrossing = 0.325;  // Im z / mu where the contour crosses Re z = abscissa
  const double mu = opt.scale / t;
  const double nu = std::max(1.0, 1.5 * opt.singularity_bound / (kCrossing * mu));
  // Phase of exp(z t) swept along the contour is ~2 pi g mu nu t; one node
  // per radian keeps the midpoint rule near 1e-11.
  const double phase = 2.0 * std::numbers::pi * kImag * opt.scale * nu;
  return std::max(opt.nodes, static_cast<int>(std::ceil(phase)));
}

/// Numerical inverse Laplace transform of `f` at time t > 0.
inline double invert_talbot(const std::function<cplx(cplx)>& f, double t, const TalbotOptions& opt = {}) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("invert_talbot: t must be positive and finite");
  if (opt.nodes < 1) throw DomainError("invert_talbot: nodes must be >= 1");
  constexpr double a = 0.5017, b = 0.6407, c = 0.6122, g = 0.2645;
  constexpr double kCrossing = 0.325;
  const double mu = opt.scale / t;
  const double nu = std::max(1.0, 1.5 * opt.singularity_bound / (kCrossing * mu));
  const int n = talbot_node_count(t, opt);
  const double h = 2.0 * std::numbers::pi / n;
  cplx acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = -std::numbers::pi + (k + 0.5) * h;
    const double bt = b * th;
    // th cot(b th) and its derivative, with the removable point th = 0
    double th_cot = a / b;
    double d_th_cot = 0.0;
    if (th != 0.0) {
      const double sn = std::sin(bt);
      const double cot = std::cos(bt) / sn;
      th_cot = a * th * cot;
      d_th_cot = a * cot - a * bt / (sn * sn);
    }
    const cplx z = opt.abscissa + mu * cplx(th_cot - c, nu * g * th);
    const cplx dz = mu * cplx(d_th_cot, nu * g);
    acc += std::exp(z * t) * f(z) * dz;
  }
  const cplx v = acc * h / cplx(0.0, 2.0 * std::numbers::pi);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NumericalError("invert_talbot: non-finite value on the contour");
  }
  return v.real();
}

/// Bound on |eigenvalue| of the averaged generator (max absolute row sum).
/// Every singularity of P1(s) lies within it.
inline double spectral_bound(const SystemParams& p) {
  return liouville::generator(p).matrix().cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace stochrabi::laplace
