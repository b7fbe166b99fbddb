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

// Direct trajectory simulation: free evolution over exponentially
// distributed waiting times, interleaved with pulses of random strength.
// Each trajectory carries a pure state (3 amplitudes); the ensemble mean of
// the populations converges to the averaged density matrix diagonal.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"

namespace stochrabi::mc {

/// Maps u in [0, 1) to a pulse strength.
using ThetaQuantile = std::function<double(double)>;

inline ThetaQuantile uniform_theta() {
  return [](double u) { return kTwoPi * u; };
}

struct TrajectoryConfig {
  SystemParams params;
  std::uint64_t n_traj = 1;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  ThetaQuantile theta_dist = uniform_theta();

  void validate() const {
    if (n_traj < 1) throw DomainError("TrajectoryConfig: n_traj must be >= 1");
    if (!theta_dist) throw DomainError("TrajectoryConfig: theta_dist is empty");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) {
        throw DomainError("TrajectoryConfig: grid times must be finite and >= 0");
      }
      if (i > 0 && t_grid[i] < t_grid[i - 1]) {
        throw DomainError("TrajectoryConfig: grid must be sorted");
      }
    }
  }
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-trajectory random stream, a pure function of (seed, index).
class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{mix64(seed), mix64(seed ^ mix64(index)), mix64(index + 0x5851F42D4C957F2DULL)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_zero() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Exponential waiting time with rate lambda, -ln(u)/lambda, u in (0, 1].
inline double sample_waiting_time(TrajectoryRng& rng, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("sample_waiting_time: lambda must be > 0");
  }
  return -std::log(rng.uniform_open_zero()) / lambda;
}

struct TrajectoryRecord {
  std::vector<std::array<double, 3>> populations;  // one per grid point
  std::vector<double> norm_error;                  // | |psi|^2 - 1 | per grid point
  std::uint64_t pulses = 0;                        // pulses up to the last grid time
};

/// One realization starting from level 1. Random draws, in order: the first
/// waiting time, then at each pulse its strength followed by the next
/// waiting time.
inline TrajectoryRecord run_trajectory(const TrajectoryConfig& config, std::uint64_t traj_index) {
  if (traj_index >= config.n_traj) throw DomainError("run_trajectory: index out of range");
  const SystemParams& p = config.params;
  const double lam = p.lambda();
  TrajectoryRng rng(config.seed, traj_index);
  constexpr double kNever = std::numeric_limits<double>::infinity();

  Vector3c psi(1.0, 0.0, 0.0);
  double now = 0.0;
  double next_pulse = lam > 0.0 ? sample_waiting_time(rng, lam) : kNever;

  TrajectoryRecord rec;
  rec.populations.reserve(config.t_grid.size());
  rec.norm_error.reserve(config.t_grid.size());
  for (double tg : config.t_grid) {
    while (next_pulse <= tg) {
      psi = unitary_propagator(p, next_pulse - now) * psi;
      now = next_pulse;
      const PulseStrength theta(config.theta_dist(rng.uniform()));
      psi = pulse_operator(theta) * psi;
      ++rec.pulses;
      next_pulse = now + sample_waiting_time(rng, lam);
    }
    if (tg > now) {
      psi = unitary_propagator(p, tg - now) * psi;
      now = tg;
    }
    const std::array<double, 3> pop{std::norm(psi(0)), std::norm(psi(1)), std::norm(psi(2))};
    rec.populations.push_back(pop);
    rec.norm_error.push_back(std::abs(pop[0] + pop[1] + pop[2] - 1.0));
  }
  return rec;
}

/// Running mean and sum of squared deviations (Welford / Chan).
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double tot = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / tot;
    m2 += o.m2 + d * d * n * o.n / tot;
    n = tot;
  }
  double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

struct Estimate {
  std::vector<double> t;
  std::array<std::vector<double>, 3> mean;
  std::array<std::vector<double>, 3> std_error;
  std::uint64_t n_traj = 0;
  double pulse_mean = 0.0;    // pulses in [0, t_grid.back()]
  double pulse_stderr = 0.0;
  double max_norm_error = 0.0;
};

/// Trajectories per work block; fixes the reduction order.
inline constexpr std::uint64_t kBlockSize = 1024;

/// Ensemble average over n_traj trajectories. Trajectories are grouped into
/// fixed blocks, processed on `threads` workers (0 = hardware concurrency)
/// and merged in block order, so the result does not depend on scheduling.
inline Estimate estimate(const TrajectoryConfig& config, unsigned threads = 0) {
  config.validate();
  const std::size_t n_grid = config.t_grid.size();
  const std::uint64_t n_blocks = (config.n_traj + kBlockSize - 1) / kBlockSize;

  struct Block {
    std::vector<std::array<Moments, 3>> pops;
    Moments pulses;
    double max_norm_error = 0.0;
  };
  std::vector<Block> blocks(n_blocks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      Block& blk = blocks[b];
      blk.pops.assign(n_grid, {});
      const std::uint64_t end = std::min(config.n_traj, (b + 1) * kBlockSize);
      for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
        const TrajectoryRecord rec = run_trajectory(config, i);
        for (std::size_t g = 0; g < n_grid; ++g) {
          for (int k = 0; k < 3; ++k) blk.pops[g][k].add(rec.populations[g][k]);
          blk.max_norm_error = std::max(blk.max_norm_error, rec.norm_error[g]);
        }
        blk.pulses.add(static_cast<double>(rec.pulses));
      }
    }
  };

  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = static_cast<unsigned>(std::min<std::uint64_t>(n_threads, n_blocks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }

  std::vector<std::array<Moments, 3>> total(n_grid);
  Moments pulses;
  Estimate est;
  for (const Block& blk : blocks) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      for (int k = 0; k < 3; ++k) total[g][k].merge(blk.pops[g][k]);
    }
    pulses.merge(blk.pulses);
    est.max_norm_error = std::max(est.max_norm_error, blk.max_norm_error);
  }

  est.t = config.t_grid;
  est.n_traj = config.n_traj;
  for (int k = 0; k < 3; ++k) {
    est.mean[k].resize(n_grid);
    est.std_error[k].resize(n_grid);
    for (std::size_t g = 0; g < n_grid; ++g) {
      est.mean[k][g] = total[g][k].mean;
      est.std_error[k][g] = total[g][k].std_error();
    }
  }
  est.pulse_mean = pulses.mean;
  est.pulse_stderr = pulses.std_error();
  return est;
}

}  // namespace stochrabi::mc
