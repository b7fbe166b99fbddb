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

// Run configuration, CSV output and mode dispatch behind the command line.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "stochrabi/analysis.hpp"
#include "stochrabi/curves.hpp"
#include "stochrabi/error.hpp"
#include "stochrabi/hilbert.hpp"
#include "stochrabi/laplace.hpp"
#include "stochrabi/liouville.hpp"

namespace stochrabi::run {

enum class Mode { analytic, resolvent, talbot, mc, compare, limits, spectrum, fig1, fig2 };
enum class Spacing { linear, log };

inline constexpr std::array<std::string_view, 9> kModeNames{
    "analytic", "resolvent", "talbot", "mc", "compare", "limits", "spectrum", "fig1", "fig2"};

inline std::string_view to_string(Mode m) { return kModeNames[static_cast<std::size_t>(m)]; }

inline constexpr std::uint64_t kDefaultSeed = 20260101;
inline constexpr std::uint64_t kDefaultTrajectories = 100000;

// compare tolerances
inline constexpr double kCompareTol = 1e-6;
inline constexpr double kMaxZ = 4.0;
// limits tolerances
inline constexpr double kRabiTol = 1e-8;
inline constexpr double kRabiTalbotTol = 1e-4;
inline constexpr double kFrozenTol = 1e-10;

struct GridSpec {
  double t_max = 20.0;
  int n_points = 200;
  Spacing spacing = Spacing::linear;
};

/// Linear: 0 .. t_max. Log: geometric from t_max * 1e-4 to t_max.
inline std::vector<double> make_grid(const GridSpec& g) {
  if (!(g.t_max > 0.0) || !std::isfinite(g.t_max)) throw ConfigError("t_max: must be > 0");
  if (g.n_points < 2) throw ConfigError("n_points: must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(g.n_points));
  const double last = g.n_points - 1;
  if (g.spacing == Spacing::linear) {
    for (int i = 0; i < g.n_points; ++i) t[i] = g.t_max * i / last;
    t.back() = g.t_max;
  } else {
    const double lo = std::log(g.t_max * 1e-4), hi = std::log(g.t_max);
    for (int i = 0; i < g.n_points; ++i) t[i] = std::exp(lo + (hi - lo) * i / last);
    t.front() = g.t_max * 1e-4;
    t.back() = g.t_max;
  }
  return t;
}

struct RunConfig {
  Mode mode = Mode::analytic;
  std::optional<double> delta, deps, lambda;
  GridSpec grid;
  std::uint64_t n_traj = kDefaultTrajectories;
  std::uint64_t seed = kDefaultSeed;
  int talbot_nodes = 64;
  std::string out = "-";
  bool gnuplot = false;

  bool is_preset() const { return mode == Mode::fig1 || mode == Mode::fig2; }

  /// Physical parameters; all three are required outside the presets.
  SystemParams params() const {
    for (auto [name, v] : {std::pair{"delta", delta}, std::pair{"deps", deps}, std::pair{"lambda", lambda}}) {
      if (!v) throw ConfigError(std::string(name) + ": required for mode " + std::string(to_string(mode)));
    }
    return {*delta, *deps, *lambda};
  }

  void validate() const {
    if (!is_preset()) params();
    make_grid(grid);
    if (n_traj < 1) throw ConfigError("n_traj: must be >= 1");
    if (talbot_nodes < 1) throw ConfigError("talbot_nodes: must be >= 1");
    if (out.empty()) throw ConfigError("out: must be a path or '-'");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

inline double parse_real(const std::string& key, const std::string& v, const char* range) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a real number " + range + ", got '" + v + "'");
  }
  return x;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v, const char* range) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer " + range + ", got '" + v + "'");
  }
  return x;
}

}  // namespace detail

/// Set one key (file or flag spelling) from its text value, with range checks.
inline void apply_key(RunConfig& cfg, std::string key, const std::string& raw) {
  key = detail::normalize_key(key);
  const std::string v = detail::trim(raw);
  if (key == "mode") {
    const auto it = std::find(kModeNames.begin(), kModeNames.end(), v);
    if (it == kModeNames.end()) {
      throw ConfigError("mode: expected one of analytic|resolvent|talbot|mc|compare|limits|spectrum|fig1|fig2, got '" + v + "'");
    }
    cfg.mode = static_cast<Mode>(it - kModeNames.begin());
  } else if (key == "delta") {
    cfg.delta = detail::parse_real(key, v, "(any finite value)");
  } else if (key == "deps") {
    cfg.deps = detail::parse_real(key, v, "(any finite value)");
  } else if (key == "lambda") {
    const double x = detail::parse_real(key, v, "(>= 0)");
    if (x < 0.0) throw ConfigError("lambda: out of range, accepted range is >= 0, got " + v);
    cfg.lambda = x;
  } else if (key == "t_max") {
    const double x = detail::parse_real(key, v, "(> 0)");
    if (!(x > 0.0)) throw ConfigError("t_max: out of range, accepted range is > 0, got " + v);
    cfg.grid.t_max = x;
  } else if (key == "n_points") {
    const std::uint64_t x = detail::parse_unsigned(key, v, "(>= 2)");
    if (x < 2 || x > 10'000'000) throw ConfigError("n_points: out of range, accepted range is [2, 10000000], got " + v);
    cfg.grid.n_points = static_cast<int>(x);
  } else if (key == "spacing") {
    if (v == "linear") cfg.grid.spacing = Spacing::linear;
    else if (v == "log") cfg.grid.spacing = Spacing::log;
    else throw ConfigError("spacing: expected linear|log, got '" + v + "'");
  } else if (key == "n_traj") {
    const std::uint64_t x = detail::parse_unsigned(key, v, "(>= 1)");
    if (x < 1) throw ConfigError("n_traj: out of range, accepted range is >= 1, got " + v);
    cfg.n_traj = x;
  } else if (key == "seed") {
    cfg.seed = detail::parse_unsigned(key, v, "(0 .. 2^64-1)");
  } else if (key == "talbot_nodes") {
    const std::uint64_t x = detail::parse_unsigned(key, v, "(>= 1)");
    if (x < 1 || x > 10'000'000) throw ConfigError("talbot_nodes: out of range, accepted range is [1, 10000000], got " + v);
    cfg.talbot_nodes = static_cast<int>(x);
  } else if (key == "out") {
    if (v.empty()) throw ConfigError("out: must be a path or '-'");
    cfg.out = v;
  } else if (key == "gnuplot") {
    if (v == "true" || v == "1") cfg.gnuplot = true;
    else if (v == "false" || v == "0") cfg.gnuplot = false;
    else throw ConfigError("gnuplot: expected true|false, got '" + v + "'");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

/// Flat key = value text; '#' and ';' start comments.
inline void apply_ini(RunConfig& cfg, std::istream& in, const std::string& origin = "config") {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = detail::trim(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_key(cfg, detail::trim(s.substr(0, eq)), s.substr(eq + 1));
  }
}

inline void apply_ini_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  apply_ini(cfg, in, path);
}

/// Shortest round-trip decimal.
inline std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return {buf.data(), ptr};
}

/// Comma-separated table writer.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
    write_row(header);
  }
  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw NumericalError("CsvWriter: row width mismatch");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    write_row(cells);
  }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  std::ostream& os_;
  std::size_t width_;
};

/// Output sink: stdout for "-", else a file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("out: cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

namespace detail {

inline void write_populations(std::ostream& os, const PopulationCurve& c) {
  CsvWriter w(os, {"t", "P1", "P2", "P3"});
  for (std::size_t i = 0; i < c.t.size(); ++i) w.row({c.t[i], c.p1[i], c.p2[i], c.p3[i]});
}

inline std::string stem_of(const std::string& out, std::string_view fallback) {
  if (out == "-") return std::string(fallback);
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot);
  return out;
}

inline void write_gnuplot(const std::string& path, const std::string& body) {
  std::ofstream gp(path);
  if (!gp) throw ConfigError("gnuplot: cannot open '" + path + "' for writing");
  gp << "set datafile separator ','\nset key autotitle columnhead\n" << body;
}

inline int run_compare(const RunConfig& cfg, std::ostream& summary) {
  const SystemParams p = cfg.params();
  const std::vector<double> t = make_grid(cfg.grid);
  const PopulationCurve an = analytic_curve(p, t);
  const PopulationCurve rs = resolvent_curve(p, t);
  const PopulationCurve tb = talbot_curve(p, t, cfg.talbot_nodes);
  const mc::Estimate est = mc_estimate(p, t, cfg.n_traj, cfg.seed);

  double disc_rs = 0.0, disc_tb = 0.0, max_z = 0.0;
  Output out(cfg.out);
  CsvWriter w(out.stream(), {"t", "P1_analytic", "P1_resolvent", "P1_talbot", "P1_mc", "P1_mc_stderr", "z_mc"});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double diff = std::abs(est.mean[0][i] - an.p1[i]);
    const double se = est.std_error[0][i];
    double z = 0.0;
    if (se > 0.0) z = diff / se;
    else if (diff > 1e-12) z = std::numeric_limits<double>::infinity();
    disc_rs = std::max(disc_rs, std::abs(an.p1[i] - rs.p1[i]));
    disc_tb = std::max(disc_tb, std::abs(an.p1[i] - tb.p1[i]));
    max_z = std::max(max_z, z);
    w.row({t[i], an.p1[i], rs.p1[i], tb.p1[i], est.mean[0][i], se, z});
  }
  out.stream().flush();
  const bool pass = disc_rs <= kCompareTol && disc_tb <= kCompareTol && max_z <= kMaxZ;
  summary << "max_disc_analytic_resolvent=" << format_double(disc_rs)
          << " max_z_mc=" << format_double(max_z) << " status=" << (pass ? "PASS" : "FAIL") << '\n';
  summary << "max_disc_analytic_talbot=" << format_double(disc_tb)
          << " tolerances: |analytic-resolvent|<=" << format_double(kCompareTol)
          << " |analytic-talbot|<=" << format_double(kCompareTol)
          << " z_mc<=" << format_double(kMaxZ) << '\n';
  return pass ? 0 : 3;
}

inline int run_limits(const RunConfig& cfg, std::ostream& summary) {
  const SystemParams base = cfg.params();
  const std::vector<double> t = make_grid(cfg.grid);
  const SystemParams rabi = base.with_lambda(0.0);
  const SystemParams frozen = base.with_delta(0.0);

  const auto r_an = analytic_p1(rabi, t);
  const auto r_rs = resolvent_curve(rabi, t).p1;
  const auto r_tb = talbot_curve(rabi, t, cfg.talbot_nodes).p1;
  const auto r_mc = mc_estimate(rabi, t, 1, cfg.seed).mean[0];
  const auto f_an = analytic_p1(frozen, t);
  const auto f_rs = resolvent_curve(frozen, t).p1;
  const auto f_tb = talbot_curve(frozen, t, cfg.talbot_nodes).p1;
  const auto f_mc = mc_estimate(frozen, t, std::min<std::uint64_t>(cfg.n_traj, 1000), cfg.seed).mean[0];

  double rabi_dev = 0.0, rabi_tb_dev = 0.0, frozen_dev = 0.0;
  Output out(cfg.out);
  CsvWriter w(out.stream(), {"t", "P1_rabi_formula", "P1_rabi_analytic", "P1_rabi_resolvent", "P1_rabi_talbot",
                             "P1_rabi_mc", "P1_frozen_analytic", "P1_frozen_resolvent", "P1_frozen_talbot",
                             "P1_frozen_mc"});
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ref = rabi_p1(rabi, t[i]);
    rabi_dev = std::max({rabi_dev, std::abs(r_an[i] - ref), std::abs(r_rs[i] - ref), std::abs(r_mc[i] - ref)});
    rabi_tb_dev = std::max(rabi_tb_dev, std::abs(r_tb[i] - ref));
    frozen_dev = std::max({frozen_dev, std::abs(f_an[i] - 1.0), std::abs(f_rs[i] - 1.0),
                           std::abs(f_tb[i] - 1.0), std::abs(f_mc[i] - 1.0)});
    w.row({t[i], ref, r_an[i], r_rs[i], r_tb[i], r_mc[i], f_an[i], f_rs[i], f_tb[i], f_mc[i]});
  }
  out.stream().flush();
  const bool pass = rabi_dev <= kRabiTol && rabi_tb_dev <= kRabiTalbotTol && frozen_dev <= kFrozenTol;
  summary << "rabi_max_dev=" << format_double(rabi_dev) << " rabi_talbot_max_dev=" << format_double(rabi_tb_dev)
          << " frozen_max_dev=" << format_double(frozen_dev) << " status=" << (pass ? "PASS" : "FAIL") << '\n';
  summary << "tolerances: rabi<=" << format_double(kRabiTol) << " rabi_talbot<=" << format_double(kRabiTalbotTol)
          << " frozen<=" << format_double(kFrozenTol) << '\n';
  return pass ? 0 : 3;
}

inline void run_fig1(const RunConfig& cfg, std::ostream& summary) {
  constexpr std::array<double, 4> kRates{0.05, 0.1, 0.2, 0.5};
  constexpr double kSpan = 12.0;  // lambda * t_max
  const int n = std::max(cfg.grid.n_points, 2001);
  Output out(cfg.out);
  CsvWriter w(out.stream(), {"lambda", "t", "lambda_t", "P1", "P2", "P3", "P1_minus_third"});
  for (double lam : kRates) {
    const SystemParams p(1.0, 0.5, lam);
    const std::vector<double> t = make_grid({kSpan / lam, n, Spacing::linear});
    const PopulationCurve c = analytic_curve(p, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      w.row({lam, t[i], lam * t[i], c.p1[i], c.p2[i], c.p3[i], c.p1[i] - analysis::kStationaryP1});
    }
  }
  out.stream().flush();
  std::vector<SystemParams> trio;
  for (double lam : {0.05, 0.1, 0.2}) trio.emplace_back(1.0, 0.5, lam);
  const auto col = analysis::collapse_check(std::span<const SystemParams>(trio));
  summary << "# delta=1 deps=0.5 lambdas=0.05,0.1,0.2,0.5 collapse_max_deviation(lambda_t in [2,8])="
          << format_double(col.max_deviation) << '\n';
  if (cfg.gnuplot) {
    const std::string stem = stem_of(cfg.out, "fig1");
    const std::string csv = cfg.out == "-" ? "fig1.csv" : cfg.out;
    write_gnuplot(stem + ".gp",
                  "set xlabel 'lambda t'\nset ylabel 'P1'\n"
                  "plot for [l in '0.05 0.1 0.2 0.5'] '" + csv +
                      "' using (($1==l+0)?$3:1/0):4 with lines title 'lambda='.l\n");
  }
}

inline void run_fig2(const RunConfig& cfg, std::ostream& summary) {
  const SystemParams p(1.0, 0.5, 0.005);
  const std::string stem = stem_of(cfg.out, "fig2");
  const std::vector<double> ts = make_grid({20.0, std::max(cfg.grid.n_points, 200), Spacing::linear});
  const std::vector<double> tl = make_grid({2000.0, std::max(cfg.grid.n_points, 4001), Spacing::linear});
  {
    const PopulationCurve c = analytic_curve(p, ts);
    Output out(stem + "_short.csv");
    CsvWriter w(out.stream(), {"t", "P1", "P2", "P3", "P1_rabi"});
    for (std::size_t i = 0; i < ts.size(); ++i) w.row({ts[i], c.p1[i], c.p2[i], c.p3[i], rabi_p1(p, ts[i])});
  }
  {
    const PopulationCurve c = analytic_curve(p, tl);
    Output out(stem + "_long.csv");
    CsvWriter w(out.stream(), {"t", "P1", "P2", "P3", "P1_minus_third"});
    for (std::size_t i = 0; i < tl.size(); ++i) {
      w.row({tl[i], c.p1[i], c.p2[i], c.p3[i], c.p1[i] - analysis::kStationaryP1});
    }
  }
  summary << "# delta=1 deps=0.5 lambda=0.005 wrote " << stem << "_short.csv " << stem << "_long.csv"
          << " rabi_deviation(t<=20)=" << format_double(analysis::rabi_deviation(p, ts)) << '\n';
  if (cfg.gnuplot) {
    write_gnuplot(stem + ".gp",
                  "set multiplot layout 2,1\nset xlabel 't'\nset ylabel 'P1'\n"
                  "plot '" + stem + "_short.csv' using 1:2 with points pt 7 ps 0.5, '' using 1:5 with lines\n"
                  "plot '" + stem + "_long.csv' using 1:2 with lines\nunset multiplot\n");
  }
}

}  // namespace detail

/// Execute one mode. CSV goes to cfg.out; summaries go to `summary`.
/// Returns 0 on success or 3 when a consistency check fails; configuration,
/// domain and numerical problems propagate as exceptions.
inline int execute(const RunConfig& cfg, std::ostream& summary) {
  cfg.validate();
  switch (cfg.mode) {
    case Mode::analytic:
    case Mode::resolvent:
    case Mode::talbot: {
      const SystemParams p = cfg.params();
      const std::vector<double> t = make_grid(cfg.grid);
      const PopulationCurve c = cfg.mode == Mode::analytic    ? analytic_curve(p, t)
                                : cfg.mode == Mode::resolvent ? resolvent_curve(p, t)
                                                              : talbot_curve(p, t, cfg.talbot_nodes);
      Output out(cfg.out);
      detail::write_populations(out.stream(), c);
      if (cfg.gnuplot && cfg.out != "-") {
        detail::write_gnuplot(detail::stem_of(cfg.out, "") + ".gp",
                              "plot '" + cfg.out + "' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
      }
      return 0;
    }
    case Mode::mc: {
      const SystemParams p = cfg.params();
      const std::vector<double> t = make_grid(cfg.grid);
      const mc::Estimate est = mc_estimate(p, t, cfg.n_traj, cfg.seed);
      Output out(cfg.out);
      CsvWriter w(out.stream(), {"t", "P1", "P2", "P3", "P1_stderr", "P2_stderr", "P3_stderr"});
      for (std::size_t i = 0; i < t.size(); ++i) {
        w.row({t[i], est.mean[0][i], est.mean[1][i], est.mean[2][i], est.std_error[0][i], est.std_error[1][i],
               est.std_error[2][i]});
      }
      return 0;
    }
    case Mode::compare:
      return detail::run_compare(cfg, summary);
    case Mode::limits:
      return detail::run_limits(cfg, summary);
    case Mode::spectrum: {
      const SystemParams p = cfg.params();
      Output out(cfg.out);
      CsvWriter w(out.stream(), {"index", "re", "im"});
      const auto ev = liouville::generator_spectrum(p);
      for (std::size_t i = 0; i < ev.size(); ++i) w.row({static_cast<double>(i), ev[i].real(), ev[i].imag()});
      return 0;
    }
    case Mode::fig1:
      detail::run_fig1(cfg, summary);
      return 0;
    case Mode::fig2:
      detail::run_fig2(cfg, summary);
      return 0;
  }
  return 0;
}

/// execute() with errors mapped to exit codes: 1 config, 2 numerical/domain.
inline int run(const RunConfig& cfg, std::ostream& summary, std::ostream& err) {
  try {
    return execute(cfg, summary);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace stochrabi::run
