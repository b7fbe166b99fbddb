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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stochrabi/analysis.hpp"
#include "stochrabi/curves.hpp"

namespace {

using namespace stochrabi;
using namespace stochrabi::analysis;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
  return t;
}

TEST(FitTailRate, ExactExponential) {
  const auto t = linspace(0.0, 100.0, 1001);
  std::vector<double> p1;
  for (double x : t) p1.push_back(1.0 / 3.0 + 0.5 * std::exp(-0.1 * x));
  const DecayFit fit = fit_tail_rate(t, p1, {20.0, 80.0});
  EXPECT_NEAR(fit.rate, 0.1, 1e-6);
  EXPECT_NEAR(fit.intercept, std::log(0.5), 1e-6);
  EXPECT_LT(fit.rms_residual, 1e-9);
  EXPECT_NEAR(fit.fit_window.lo, 20.0, 1e-12);
  EXPECT_NEAR(fit.fit_window.hi, 80.0, 1e-12);
}

TEST(FitTailRate, RecoversRandomRates) {
  oracle::Gen gen(51);
  for (int k = 0; k < 50; ++k) {
    const double a = gen.uniform(0.05, 2.0), c = gen.uniform(0.01, 1.0);
    const auto t = linspace(0.0, 10.0 / c, 500);
    std::vector<double> p1;
    for (double x : t) p1.push_back(1.0 / 3.0 + a * std::exp(-c * x));
    EXPECT_NEAR(fit_tail_rate(t, p1, {1.0 / c, 6.0 / c}).rate, c, 1e-6 * c);
  }
}

TEST(FitTailRate, WindowCappedAtFloor) {
  const auto t = linspace(0.0, 400.0, 4001);
  std::vector<double> p1;
  for (double x : t) p1.push_back(1.0 / 3.0 + std::exp(-0.1 * x));  // below 1e-7 after t ~ 161
  const DecayFit fit = fit_tail_rate(t, p1, {20.0, 400.0});
  EXPECT_LT(fit.fit_window.hi, 162.0);
  EXPECT_NEAR(fit.rate, 0.1, 1e-6);
}

TEST(FitTailRate, Errors) {
  const auto t = linspace(0.0, 20.0, 400);
  std::vector<double> rabi;
  for (double x : t) rabi.push_back(oracle::rabi(1.0, 0.5, x));
  EXPECT_THROW(fit_tail_rate(t, rabi, {2.0, 18.0}), DomainError);
  std::vector<double> few;
  for (double x : t) few.push_back(1.0 / 3.0 + std::exp(-x));
  EXPECT_THROW(fit_tail_rate(t, few, {0.0, 0.1}), DomainError);   // 2 points
  EXPECT_THROW(fit_tail_rate(t, few, {5.0, 30.0}), DomainError);  // outside data
  EXPECT_THROW(fit_tail_rate(t, std::vector<double>(3, 0.5), {1.0, 2.0}), DomainError);
}

TEST(FitTailRate, TailRateIncreasesWithRate) {
  // Late window [6/lambda, 12/lambda], past the sign changes of P1 - 1/3.
  double previous = 0.0;
  for (double lam : {0.005, 0.05, 0.5}) {
    const SystemParams p(1.0, 0.5, lam);
    const auto t = linspace(0.0, 12.0 / lam, 12001);
    const DecayFit fit = fit_tail_rate(t, analytic_p1(p, t), {6.0 / lam, 12.0 / lam});
    EXPECT_GT(fit.rate, previous);
    previous = fit.rate;
  }
}

TEST(CollapseCheck, IdenticalRatesGiveZero) {
  const std::vector<SystemParams> ps{{1.0, 0.5, 0.1}, {1.0, 0.5, 0.1}};
  EXPECT_EQ(collapse_check(std::span<const SystemParams>(ps)).max_deviation, 0.0);
}

TEST(CollapseCheck, Errors) {
  const std::vector<SystemParams> zero{{1.0, 0.5, 0.0}, {1.0, 0.5, 0.1}};
  EXPECT_THROW(collapse_check(std::span<const SystemParams>(zero)), DomainError);
  const std::vector<SystemParams> one{{1.0, 0.5, 0.1}};
  EXPECT_THROW(collapse_check(std::span<const SystemParams>(one)), DomainError);
  const std::vector<SystemParams> mixed{{1.0, 0.5, 0.1}, {1.0, 0.7, 0.2}};
  EXPECT_THROW(collapse_check(std::span<const SystemParams>(mixed)), DomainError);
  std::vector<RateCurve> short_curves{{0.1, linspace(0, 30, 100), std::vector<double>(100, 0.5)},
                                      {0.2, linspace(0, 30, 100), std::vector<double>(100, 0.5)}};
  EXPECT_THROW(collapse_check(std::span<const RateCurve>(short_curves)), DomainError);
}

TEST(CollapseCheck, ExactScalingFunctionCollapses) {
  // Curves that depend on lambda*t only collapse to interpolation error.
  std::vector<RateCurve> curves;
  for (double lam : {0.05, 0.1, 0.2}) {
    RateCurve c{lam, linspace(0.0, 10.0 / lam, 2001), {}};
    for (double x : c.t) c.p1.push_back(1.0 / 3.0 + (2.0 / 3.0) * std::exp(-lam * x));
    curves.push_back(std::move(c));
  }
  EXPECT_LT(collapse_check(std::span<const RateCurve>(curves)).max_deviation, 1e-4);
}

TEST(RabiDeviation, Examples) {
  EXPECT_LT(rabi_deviation({1.0, 0.5, 0.0}, linspace(0.0, 20.0, 200)), 1e-9);
  EXPECT_LE(rabi_deviation({1.0, 0.5, 0.005}, linspace(0.0, 20.0, 200)), 0.05);
  EXPECT_GT(rabi_deviation({1.0, 0.5, 0.005}, linspace(400.0, 1600.0, 1201)), 0.3);
}

}  // namespace
