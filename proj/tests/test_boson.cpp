#include <gtest/gtest.h>

#include <cmath>

#include "ionsim/boson.hpp"
#include "ionsim/errors.hpp"

using namespace ionsim;

TEST(FockMode, Guards) {
  EXPECT_EQ(FockMode(4).dim(), 5);
  EXPECT_EQ(FockMode().cutoff(), 32);
  EXPECT_DOUBLE_EQ(FockMode(16).excursion_limit(), 2.0);
  EXPECT_THROW(FockMode(3), DimensionError);
  EXPECT_THROW(FockMode(8, 0.0), std::invalid_argument);
}

TEST(Quadrature, LowLevelMatrixElements) {
  // The cutoff-2 matrices are the leading 3x3 blocks at any larger cutoff.
  const FockMode mode(4);
  const double r = 1.0 / std::sqrt(2.0), s2 = std::sqrt(2.0);
  ComplexMatrix x(3, 3), p(3, 3);
  x << 0, 1, 0, 1, 0, s2, 0, s2, 0;
  x *= r;
  p << 0, -1, 0, 1, 0, -s2, 0, s2, 0;
  p *= Complex{0.0, r};
  EXPECT_LT(max_entry_norm(quadrature(mode, Quadrature::kX).topLeftCorner(3, 3) - x), 1e-15);
  EXPECT_LT(max_entry_norm(quadrature(mode, Quadrature::kP).topLeftCorner(3, 3) - p), 1e-15);
}

TEST(Quadrature, HermitianAndCanonicalAwayFromCorner) {
  for (int cutoff : {4, 10, 32}) {
    const FockMode mode(cutoff);
    const ComplexMatrix x = quadrature(mode, Quadrature::kX);
    const ComplexMatrix p = quadrature(mode, Quadrature::kP);
    EXPECT_LT(max_entry_norm(x - x.adjoint()), 1e-15);
    EXPECT_LT(max_entry_norm(p - p.adjoint()), 1e-15);
    const ComplexMatrix c = x * p - p * x;
    const Index n = mode.dim() - 1;
    EXPECT_LT(max_entry_norm(c.topLeftCorner(n, n) - kI * ComplexMatrix::Identity(n, n)), 1e-13);
    EXPECT_NEAR(std::abs(c(n, n) - Complex{0.0, -static_cast<double>(cutoff)}), 0.0, 1e-12);
  }
}

TEST(Displacement, IdentityAndInverse) {
  const FockMode mode(32);
  EXPECT_LT(max_entry_norm(displacement(mode, 0.0) - ComplexMatrix::Identity(33, 33)), 1e-15);
  const Complex beta{0.7, 0.2};
  EXPECT_LT(max_entry_norm(displacement(mode, beta) * displacement(mode, -beta) - ComplexMatrix::Identity(33, 33)),
            1e-10);
}

TEST(Displacement, VacuumOverlap) {
  const FockMode mode(40);
  EXPECT_NEAR(std::abs(displacement(mode, 1.0)(0, 0)), std::exp(-0.5), 1e-8);
}

TEST(Displacement, CoherentAmplitudesArePoissonian) {
  const FockMode mode(40);
  const Complex alpha{0.9, -0.6};
  const StateVector v = displacement(mode, alpha).col(0);
  double factorial = 1.0;
  for (int n = 0; n < 15; ++n) {
    if (n > 0) factorial *= n;
    const Complex expected = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(factorial);
    EXPECT_LT(std::abs(v(n) - expected), 1e-10) << n;
  }
}

TEST(Displacement, UnitaryAcrossTheGuard) {
  const FockMode mode(32);
  for (double r : {0.1, 1.0, 2.0, 2.8}) {
    EXPECT_LT(unitarity_defect(displacement(mode, std::polar(r, 0.3))), 1e-10);
  }
}

TEST(Displacement, HeisenbergComposition) {
  const FockMode mode(60);
  const Complex b1{0.5, 0.3}, b2{-0.2, 0.6};
  const ComplexMatrix lhs = displacement(mode, b1) * displacement(mode, b2);
  const ComplexMatrix rhs = std::polar(1.0, (b1 * std::conj(b2)).imag()) * displacement(mode, b1 + b2);
  // Compare on columns whose support stays far from the truncation edge.
  EXPECT_LT(max_entry_norm((lhs - rhs).leftCols(12)), 1e-8);
}

TEST(Displacement, GuardRejectsLargeAmplitude) {
  const FockMode mode(16);
  EXPECT_THROW(displacement(mode, 2.1), TruncationError);
  EXPECT_NO_THROW(displacement(mode, 2.0));
}

TEST(ReferenceState, GroundFockCoherent) {
  const FockMode mode(16);
  const ModeState ground = reference_state(mode, GroundState{});
  EXPECT_EQ(ground.vector, StateVector::Unit(17, 0));
  EXPECT_EQ(reference_state(mode, FockState{3}).vector, StateVector::Unit(17, 3));
  EXPECT_FALSE(ground.leakage_flagged);
  EXPECT_THROW(reference_state(mode, FockState{15}), TruncationError);
  EXPECT_THROW(reference_state(mode, CoherentState{Complex{2.5, 0.0}}), TruncationError);
}

TEST(ReferenceState, CoherentMoments) {
  const FockMode mode(32);
  const ModeState c = reference_state(mode, CoherentState{Complex{1.0, 0.0}});
  EXPECT_NEAR(c.vector.norm(), 1.0, 1e-12);
  EXPECT_NEAR(mean_occupation(c.vector), 1.0, 1e-6);
  double second = 0.0;
  for (Index n = 0; n < c.vector.size(); ++n) second += static_cast<double>(n * n) * std::norm(c.vector(n));
  EXPECT_NEAR(second - 1.0, 1.0, 1e-6);  // Poisson: variance equals mean
}

TEST(Leakage, SmallForModestCoherentStates) {
  const FockMode mode(32);
  for (double a : {0.5, 1.0, 2.0}) {
    const ModeState c = reference_state(mode, CoherentState{Complex{0.0, a}});
    EXPECT_LT(c.leakage, 1e-10);
    EXPECT_FALSE(c.leakage_flagged);
  }
}

TEST(Leakage, FlagsTopLevels) {
  const FockMode mode(8, 1e-10);
  StateVector v = StateVector::Zero(9);
  v(0) = std::sqrt(0.99);
  v(8) = std::sqrt(0.01);
  EXPECT_NEAR(leakage(mode, v), 0.01, 1e-15);
  const ModeState big = reference_state(FockMode(4), CoherentState{Complex{1.0, 0.0}});
  EXPECT_TRUE(big.leakage_flagged);
}
