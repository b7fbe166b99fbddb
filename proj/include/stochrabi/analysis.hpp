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

// Post-processing of P1(t): exponential tail fits, collapse in lambda*t and
// deviation from the coherent two-level curve.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stochrabi/curves.hpp"
#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"

namespace stochrabi::analysis {

inline constexpr double kStationaryP1 = 1.0 / 3.0;
/// Subtracted values below this end the usable part of the window.
inline constexpr double kWindowFloor = 1e-7;
/// Ten times the numerical noise floor; anything at or below is unusable.
inline constexpr double kUsableFloor = 1e-8;

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// [2/lambda, 8/lambda].
inline Window default_tail_window(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("default_tail_window: lambda must be > 0");
  return {2.0 / lambda, 8.0 / lambda};
}

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;     // of ln(P1 - 1/3)
  double rms_residual = 0.0;  // in ln space
  Window fit_window;          // effective window actually used
  std::size_t n_points = 0;
};

/// Least-squares line through (t, ln(P1 - 1/3)) on the window; rate = -slope.
/// The window end is pulled in to the last point still above 1e-7.
inline DecayFit fit_tail_rate(std::span<const double> t, std::span<const double> p1, Window window) {
  if (t.size() != p1.size()) throw DomainError("fit_tail_rate: t and p1 differ in length");
  if (t.empty()) throw DomainError("fit_tail_rate: empty input");
  if (!(window.lo < window.hi)) throw DomainError("fit_tail_rate: empty window");
  const double slack = 1e-9 * std::max(1.0, std::abs(t.back()));
  if (window.lo < t.front() - slack || window.hi > t.back() + slack) {
    throw DomainError("fit_tail_rate: window outside the data range");
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= window.lo && t[i] <= window.hi) idx.push_back(i);
  }
  std::size_t last = 0;
  bool any = false;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (p1[idx[k]] - kStationaryP1 >= kWindowFloor) {
      last = k;
      any = true;
    }
  }
  if (!any) throw DomainError("fit_tail_rate: too few usable points (no values above 1e-7)");
  idx.resize(last + 1);
  for (std::size_t i : idx) {
    if (!(p1[i] - kStationaryP1 > kUsableFloor)) {
      throw DomainError("fit_tail_rate: nonpositive subtracted values in window at t=" +
                        std::to_string(t[i]));
    }
  }
  if (idx.size() < 10) {
    throw DomainError("fit_tail_rate: too few usable points (" + std::to_string(idx.size()) +
                      " < 10)");
  }
  const double n = static_cast<double>(idx.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i : idx) {
    sx += t[i];
    sy += std::log(p1[i] - kStationaryP1);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i : idx) {
    const double dx = t[i] - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p1[i] - kStationaryP1) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_tail_rate: degenerate time points");
  const double slope = sxy / sxx;
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i : idx) {
    const double r = std::log(p1[i] - kStationaryP1) - (fit.intercept + slope * t[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.fit_window = {t[idx.front()], t[idx.back()]};
  fit.n_points = idx.size();
  return fit;
}

/// A P1 curve tagged with its pulse rate.
struct RateCurve {
  double lambda = 0.0;
  std::vector<double> t;
  std::vector<double> p1;
};

struct CollapseResult {
  std::vector<double> lambda_t;              // common grid
  std::vector<std::vector<double>> curves;   // resampled P1, one per input
  double max_deviation = 0.0;                // max pairwise |difference|
};

namespace detail {

inline double interp(std::span<const double> x, std::span<const double> y, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

}  // namespace detail

/// Resample each curve onto a common lambda*t grid over `window` by linear
/// interpolation and report the largest pairwise deviation.
inline CollapseResult collapse_check(std::span<const RateCurve> curves, Window window = {2.0, 8.0},
                                     std::size_t n_grid = 601) {
  if (curves.size() < 2) throw DomainError("collapse_check: need at least two curves");
  if (n_grid < 2) throw DomainError("collapse_check: n_grid must be >= 2");
  for (const RateCurve& c : curves) {
    if (!(c.lambda > 0.0)) throw DomainError("collapse_check: lambda must be > 0 (lambda*t degenerate)");
    if (c.t.size() != c.p1.size() || c.t.size() < 2) throw DomainError("collapse_check: malformed curve");
    const double lo = c.lambda * c.t.front(), hi = c.lambda * c.t.back();
    const double slack = 1e-9 * std::max(1.0, window.hi);
    if (lo > window.lo + slack || hi < window.hi - slack) {
      throw DomainError("collapse_check: insufficient overlap of lambda*t ranges with the window");
    }
  }
  CollapseResult out;
  out.lambda_t.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    out.lambda_t[i] = window.lo + (window.hi - window.lo) * static_cast<double>(i) / static_cast<double>(n_grid - 1);
  }
  for (const RateCurve& c : curves) {
    std::vector<double> x(c.t.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = c.lambda * c.t[i];
    std::vector<double> y(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) y[i] = detail::interp(x, c.p1, out.lambda_t[i]);
    out.curves.push_back(std::move(y));
  }
  for (std::size_t a = 0; a < out.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < out.curves.size(); ++b) {
      for (std::size_t i = 0; i < n_grid; ++i) {
        out.max_deviation = std::max(out.max_deviation, std::abs(out.curves[a][i] - out.curves[b][i]));
      }
    }
  }
  return out;
}

/// Same check from parameters: each curve is computed exactly on a dense
/// native grid t in [0, window.hi / lambda].
inline CollapseResult collapse_check(std::span<const SystemParams> params_list, Window window = {2.0, 8.0},
                                     std::size_t native_points = 4001) {
  if (params_list.size() < 2) throw DomainError("collapse_check: need at least two parameter sets");
  for (const SystemParams& p : params_list) {
    if (p.delta() != params_list.front().delta() || p.deps() != params_list.front().deps()) {
      throw DomainError("collapse_check: parameter sets must share delta and deps");
    }
    if (!(p.lambda() > 0.0)) throw DomainError("collapse_check: lambda must be > 0 (lambda*t degenerate)");
  }
  std::vector<RateCurve> curves;
  for (const SystemParams& p : params_list) {
    RateCurve c;
    c.lambda = p.lambda();
    c.t.resize(native_points);
    const double t_end = window.hi / p.lambda();
    for (std::size_t i = 0; i < native_points; ++i) {
      c.t[i] = t_end * static_cast<double>(i) / static_cast<double>(native_points - 1);
    }
    c.p1 = analytic_p1(p, c.t);
    curves.push_back(std::move(c));
  }
  return collapse_check(std::span<const RateCurve>(curves), window);
}

/// Max over the grid of |P1(t) - two-level formula|, P1 from the exact
/// residue pipeline.
inline double rabi_deviation(const SystemParams& p, std::span<const double> t_grid) {
  const std::vector<double> p1 = analytic_p1(p, t_grid);
  double dev = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    dev = std::max(dev, std::abs(p1[i] - rabi_p1(p, t_grid[i])));
  }
  return dev;
}

}  // namespace stochrabi::analysis
