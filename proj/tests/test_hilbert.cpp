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
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stochrabi/hilbert.hpp"

namespace {

using namespace stochrabi;
constexpr double kPi = std::numbers::pi;

double max_abs(const Matrix3c& m) { return m.cwiseAbs().maxCoeff(); }

TEST(SystemParams, RejectsNegativeOrNonFiniteLambda) {
  EXPECT_THROW(SystemParams(1.0, 0.5, -0.1), DomainError);
  EXPECT_THROW(SystemParams(1.0, 0.5, std::nan("")), DomainError);
  EXPECT_THROW(SystemParams(INFINITY, 0.5, 0.1), DomainError);
  EXPECT_NO_THROW(SystemParams(1.0, 0.5, 0.0));
}

TEST(SystemParams, OmegaFollowsUpdates) {
  const SystemParams p(1.0, 0.5, 0.1);
  EXPECT_DOUBLE_EQ(p.omega(), std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(p.with_delta(0.0).omega(), 0.5);
  EXPECT_DOUBLE_EQ(p.with_lambda(2.0).lambda(), 2.0);
}

TEST(SystemParams, FromEnergiesDropsMean) {
  const SystemParams p = SystemParams::from_energies(3.0, 2.0, 1.0, 0.2);
  EXPECT_DOUBLE_EQ(p.deps(), 0.5);
  EXPECT_DOUBLE_EQ(p.delta(), 1.0);
  EXPECT_DOUBLE_EQ(p.lambda(), 0.2);
}

TEST(PulseStrength, ReducedIntoRange) {
  EXPECT_DOUBLE_EQ(PulseStrength(0.0).value(), 0.0);
  EXPECT_NEAR(PulseStrength(-kPi / 2).value(), 1.5 * kPi, 1e-15);
  EXPECT_NEAR(PulseStrength(5 * kPi).value(), kPi, 1e-14);
  EXPECT_LT(PulseStrength(2 * kPi).value(), 2 * kPi);
  EXPECT_THROW(PulseStrength(std::nan("")), DomainError);
}

TEST(BuildH0, MatchesLayout) {
  Matrix3c expect;
  expect << 0.5, 1, 0, 1, -0.5, 0, 0, 0, 0;
  EXPECT_EQ(max_abs(build_h0({1.0, 0.5, 0.0}) - expect), 0.0);
  EXPECT_EQ(max_abs(build_h0({0.0, 0.0, 0.0})), 0.0);
  Matrix3c diag = Matrix3c::Zero();
  diag(0, 0) = 1.0;
  diag(1, 1) = -1.0;
  EXPECT_EQ(max_abs(build_h0({0.0, 1.0, 0.0}) - diag), 0.0);
}

TEST(UnitaryPropagator, IdentityAtZeroAndDegenerate) {
  EXPECT_LT(max_abs(unitary_propagator({1.0, 0.5, 0.0}, 0.0) - Matrix3c::Identity()), 1e-15);
  EXPECT_EQ(max_abs(unitary_propagator({0.0, 0.0, 0.0}, 3.7) - Matrix3c::Identity()), 0.0);
  EXPECT_THROW(unitary_propagator({1.0, 0.5, 0.0}, INFINITY), DomainError);
}

TEST(UnitaryPropagator, ResonantHalfPeriodSwaps) {
  const Matrix3c u = unitary_propagator({1.0, 0.0, 0.0}, kPi / 2);
  Matrix3c expect = Matrix3c::Zero();
  expect(0, 1) = expect(1, 0) = cplx(0.0, -1.0);
  expect(2, 2) = 1.0;
  EXPECT_LT(max_abs(u - expect), 1e-15);
}

TEST(UnitaryPropagator, MatchesSeriesExponential) {
  const SystemParams p(1.0, 0.5, 0.0);
  const Matrix3c ref = oracle::taylor_exp<Matrix3c>(cplx(0.0, -1.0) * build_h0(p));
  const Matrix3c u = unitary_propagator(p, 1.0);
  EXPECT_LT(max_abs(u - ref), 1e-14);
  const double w = std::sqrt(1.25);
  EXPECT_NEAR(std::norm(u(0, 0)), std::cos(w) * std::cos(w) + 0.2 * std::sin(w) * std::sin(w), 1e-14);
}

TEST(PulseOperator, SpecialAngles) {
  EXPECT_LT(max_abs(pulse_operator(PulseStrength(0.0)) - Matrix3c::Identity()), 1e-15);
  const Matrix3c a = pulse_operator(PulseStrength(kPi / 2));
  EXPECT_LT(max_abs(a - oracle::taylor_exp<Matrix3c>(oracle::pulse_generator(kPi / 2))), 1e-14);
  EXPECT_LT(std::abs(a(2, 1) - cplx(0.0, -1.0)), 1e-15);
  EXPECT_LT(std::abs(a(1, 2) - cplx(0.0, -1.0)), 1e-15);
  Matrix3c flip = Matrix3c::Zero();
  flip(0, 0) = 1.0;
  flip(1, 1) = flip(2, 2) = -1.0;
  EXPECT_LT(max_abs(pulse_operator(PulseStrength(kPi)) - flip), 1e-15);
}

TEST(ApplyPulse, Examples) {
  const auto one = DensityMatrix::pure_level(0);
  for (double th : {0.3, 1.7, 4.0}) {
    EXPECT_LT(max_abs(apply_pulse(one, PulseStrength(th)).matrix() - one.matrix()), 1e-15);
    const auto mixed = DensityMatrix::maximally_mixed();
    EXPECT_LT(max_abs(apply_pulse(mixed, PulseStrength(th)).matrix() - mixed.matrix()), 1e-15);
  }
  const auto moved = apply_pulse(DensityMatrix::pure_level(1), PulseStrength(kPi / 2));
  EXPECT_LT(max_abs(moved.matrix() - DensityMatrix::pure_level(2).matrix()), 1e-15);
}

TEST(DensityMatrix, DiagnosticsFlagViolations) {
  EXPECT_TRUE(DensityMatrix::maximally_mixed().is_valid());
  Matrix3c bad = Matrix3c::Zero();
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  const auto d = DensityMatrix(bad).diagnostics();
  EXPECT_LT(d.trace_error, 1e-15);
  EXPECT_NEAR(d.min_eigenvalue, -0.5, 1e-14);
  EXPECT_FALSE(DensityMatrix(bad).is_valid());
  Matrix3c nonherm = DensityMatrix::maximally_mixed().matrix();
  nonherm(0, 1) = 0.1;
  EXPECT_FALSE(DensityMatrix(nonherm).is_valid());
}

// Properties on random inputs.

TEST(HilbertProperties, PropagatorSemigroupAndUnitarity) {
  oracle::Gen gen(11);
  for (int k = 0; k < 200; ++k) {
    const SystemParams p = gen.params();
    const double t1 = gen.uniform(-20, 20), t2 = gen.uniform(-20, 20);
    const Matrix3c u1 = unitary_propagator(p, t1);
    EXPECT_LT(max_abs(u1 * unitary_propagator(p, t2) - unitary_propagator(p, t1 + t2)), 1e-10);
    EXPECT_LT(max_abs(u1 * u1.adjoint() - Matrix3c::Identity()), 1e-12);
  }
}

TEST(HilbertProperties, PulseInverseAndUnitarity) {
  oracle::Gen gen(12);
  for (int k = 0; k < 200; ++k) {
    const double th = gen.uniform(-10, 10);
    const Matrix3c a = pulse_operator(PulseStrength(th));
    EXPECT_LT(max_abs(a * pulse_operator(PulseStrength(-th)) - Matrix3c::Identity()), 1e-12);
    EXPECT_LT(max_abs(a * a.adjoint() - Matrix3c::Identity()), 1e-12);
  }
}

TEST(HilbertProperties, ConjugationsPreserveInvariantsAndLevelOne) {
  oracle::Gen gen(13);
  for (int k = 0; k < 200; ++k) {
    const DensityMatrix rho = gen.density();
    ASSERT_TRUE(rho.is_valid());
    const PulseStrength th(gen.uniform(0, 2 * kPi));
    const DensityMatrix pulsed = apply_pulse(rho, th);
    EXPECT_TRUE(pulsed.is_valid());
    EXPECT_NEAR(pulsed.population(0), rho.population(0), 1e-15);
    const DensityMatrix evolved = conjugate(rho, unitary_propagator(gen.params(), gen.uniform(0, 50)));
    EXPECT_TRUE(evolved.is_valid());
  }
}

}  // namespace
