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

// Population curves P1, P2, P3 on a time grid, one function per method.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"
#include "stochrabi/laplace.hpp"
#include "stochrabi/liouville.hpp"
#include "stochrabi/montecarlo.hpp"

namespace stochrabi {

struct PopulationCurve {
  std::vector<double> t;
  std::vector<double> p1, p2, p3;
};

/// Closed-form two-level oscillation, (delta^2 cos^2(w t) + deps^2) / w^2.
inline double rabi_p1(const SystemParams& p, double t) {
  const double w = p.omega();
  if (w == 0.0) return 1.0;
  const double c = std::cos(w * t);
  return (p.delta() * p.delta() * c * c + p.deps() * p.deps()) / (w * w);
}

namespace detail {

inline void check_grid(std::span<const double> t_grid, const char* who) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1])) {
      throw DomainError(std::string(who) + ": time grid must be finite, nonnegative and sorted");
    }
  }
}

inline PopulationCurve from_p1_p3(std::span<const double> t, std::vector<double> p1,
                                  std::vector<double> p3) {
  PopulationCurve c;
  c.t.assign(t.begin(), t.end());
  c.p2.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) c.p2[i] = 1.0 - p1[i] - p3[i];
  c.p1 = std::move(p1);
  c.p3 = std::move(p3);
  return c;
}

}  // namespace detail

/// Exact pole/residue inversion of the rational P1(s) and P3(s).
inline PopulationCurve analytic_curve(const SystemParams& p, std::span<const double> t_grid) {
  detail::check_grid(t_grid, "analytic_curve");
  const laplace::RationalLaplaceFn f1 = laplace::build_rational_p1(p);
  const laplace::RationalLaplaceFn f3 = laplace::build_rational_p3(p, f1);
  return detail::from_p1_p3(t_grid, laplace::invert_residues(f1, t_grid),
                            laplace::invert_residues(f3, t_grid));
}

/// P1 only, from the residue pipeline.
inline std::vector<double> analytic_p1(const SystemParams& p, std::span<const double> t_grid) {
  detail::check_grid(t_grid, "analytic_p1");
  return laplace::invert_residues(laplace::build_rational_p1(p), t_grid);
}

/// Matrix-exponential propagation of rho(0) = |1><1|.
inline PopulationCurve resolvent_curve(const SystemParams& p, std::span<const double> t_grid) {
  const auto states = liouville::propagate(DensityMatrix::pure_level(0), p, t_grid);
  PopulationCurve c;
  c.t.assign(t_grid.begin(), t_grid.end());
  for (const DensityMatrix& rho : states) {
    c.p1.push_back(rho.population(0));
    c.p2.push_back(rho.population(1));
    c.p3.push_back(rho.population(2));
  }
  return c;
}

/// Talbot inversion of P1(s) and P3(s); t = 0 takes the initial condition.
inline PopulationCurve talbot_curve(const SystemParams& p, std::span<const double> t_grid,
                                    int nodes = 64) {
  detail::check_grid(t_grid, "talbot_curve");
  laplace::TalbotOptions opt;
  opt.nodes = nodes;
  opt.singularity_bound = laplace::spectral_bound(p);
  const auto f1 = [&p](cplx s) { return laplace::p1_laplace(p, s); };
  const auto f3 = [&p](cplx s) { return laplace::p3_laplace(p, s); };
  std::vector<double> p1, p3;
  for (double t : t_grid) {
    if (t == 0.0) {
      p1.push_back(1.0);
      p3.push_back(0.0);
    } else {
      p1.push_back(laplace::invert_talbot(f1, t, opt));
      p3.push_back(laplace::invert_talbot(f3, t, opt));
    }
  }
  return detail::from_p1_p3(t_grid, std::move(p1), std::move(p3));
}

/// Monte Carlo estimate with the default uniform strength distribution.
inline mc::Estimate mc_estimate(const SystemParams& p, std::span<const double> t_grid,
                                std::uint64_t n_traj, std::uint64_t seed, unsigned threads = 0) {
  mc::TrajectoryConfig cfg;
  cfg.params = p;
  cfg.n_traj = n_traj;
  cfg.seed = seed;
  cfg.t_grid.assign(t_grid.begin(), t_grid.end());
  return mc::estimate(cfg, threads);
}

}  // namespace stochrabi
