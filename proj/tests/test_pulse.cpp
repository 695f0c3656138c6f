#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ionsim/errors.hpp"
#include "ionsim/pulse.hpp"
#include "oracles.hpp"

using namespace ionsim;

namespace {

ComplexMatrix jz_twist(const SpinRegister& reg, double theta) {
  const ComplexMatrix jz = collective_operator(reg, Axis::kZ);
  return matrix_exponential(Complex{0.0, -theta} * jz * jz);
}

// <phi| (x) I_spin applied to a joint vector.
StateVector reduce(const StateVector& joint, const StateVector& mode_state, Index spin_dim) {
  const Index b = mode_state.size();
  StateVector out(spin_dim);
  for (Index s = 0; s < spin_dim; ++s) out(s) = mode_state.dot(joint.segment(s * b, b));
  return out;
}

}  // namespace

TEST(ConditionalDisplacement, ZeroBetaIsIdentity) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const FockMode mode(8);
  const ComplexMatrix u = conditional_displacement_unitary(reg, mode, 0.0, CollectiveJz{});
  EXPECT_LT(max_entry_norm(u - ComplexMatrix::Identity(27, 27)), 1e-15);
}

TEST(ConditionalDisplacement, SingleIonBlocks) {
  const SpinRegister reg = SpinRegister::full(1);
  const FockMode mode(16);
  const ComplexMatrix u = conditional_displacement_unitary(reg, mode, 0.8, SingleIon{0});
  const Index b = mode.dim();
  EXPECT_LT(max_entry_norm(u.block(0, 0, b, b) - displacement(mode, -0.4)), 1e-14);
  EXPECT_LT(max_entry_norm(u.block(b, b, b, b) - displacement(mode, 0.4)), 1e-14);
  EXPECT_LT(max_entry_norm(u.block(0, b, b, b)), 1e-15);
}

TEST(ConditionalDisplacement, CollectiveBlocks) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const FockMode mode(16);
  const ComplexMatrix u = conditional_displacement_unitary(reg, mode, 0.5, CollectiveJz{});
  const Index b = mode.dim();
  EXPECT_LT(max_entry_norm(u.block(0, 0, b, b) - displacement(mode, -0.5)), 1e-14);
  EXPECT_LT(max_entry_norm(u.block(b, b, b, b) - ComplexMatrix::Identity(b, b)), 1e-15);
  EXPECT_LT(max_entry_norm(u.block(2 * b, 2 * b, b, b) - displacement(mode, 0.5)), 1e-14);
}

TEST(ConditionalDisplacement, WeightGuards) {
  const FockMode mode(16);
  EXPECT_THROW(conditional_displacement_unitary(SpinRegister::symmetric(2), mode, 0.1, SingleIon{0}),
               RepresentationError);
  EXPECT_THROW(conditional_displacement_unitary(SpinRegister::full(2), mode, 0.1, SingleIon{2}), IndexError);
  // |beta| * max|w| = 2.2 * 1 exceeds sqrt(16)/2 = 2.
  EXPECT_THROW(conditional_displacement_unitary(SpinRegister::symmetric(2), mode, 2.2, CollectiveJz{}),
               TruncationError);
}

TEST(Compose, IdentityAndInversePair) {
  const SpinRegister reg = SpinRegister::symmetric(3);
  const FockMode mode(16);
  const Index d = reg.dim() * mode.dim();
  EXPECT_LT(max_entry_norm(compose(reg, mode, {CarrierPulse{Axis::kX, 0.0, std::nullopt}}) -
                           ComplexMatrix::Identity(d, d)),
            1e-15);
  const Complex beta{0.3, -0.2};
  const ComplexMatrix u = compose(reg, mode, {ConditionalDisplacement{beta, CollectiveJz{}},
                                              ConditionalDisplacement{-beta, CollectiveJz{}}});
  EXPECT_LT(max_entry_norm(u - ComplexMatrix::Identity(d, d)), 1e-10);
  EXPECT_THROW(compose(reg, mode, {}), std::invalid_argument);
}

TEST(Compose, CarrierActsAsSpinTimesIdentity) {
  const SpinRegister reg = SpinRegister::full(2);
  const FockMode mode(6);
  const ComplexMatrix u = compose(reg, mode, {CarrierPulse{Axis::kY, 0.7, std::vector<int>{1}}});
  const ComplexMatrix expected =
      tensor_product(carrier_rotation(reg, Axis::kY, 0.7, {1}), ComplexMatrix::Identity(mode.dim(), mode.dim()));
  EXPECT_LT(max_entry_norm(u - expected), 1e-15);
}

TEST(Compose, AssociativeAndConsistentWithEvolve) {
  const SpinRegister reg = SpinRegister::full(2);
  const FockMode mode(12);
  const PulseSequence s1{ConditionalDisplacement{Complex{0.2, 0.1}, SingleIon{0}},
                         CarrierPulse{Axis::kX, 0.4, std::nullopt}};
  const PulseSequence s2{ConditionalDisplacement{Complex{-0.3, 0.0}, IonSetJz{{0, 1}}},
                         CarrierPulse{Axis::kZ, 1.1, std::vector<int>{0}}};
  PulseSequence both = s1;
  both.insert(both.end(), s2.begin(), s2.end());
  const ComplexMatrix u = compose(reg, mode, both);
  EXPECT_LT(max_entry_norm(u - compose(reg, mode, s2) * compose(reg, mode, s1)), 1e-12);

  StateVector psi = StateVector::Zero(u.rows());
  psi(3) = 0.6;
  psi(mode.dim() + 1) = Complex{0.0, 0.8};
  EXPECT_LT((evolve(reg, mode, both, psi) - u * psi).norm(), 1e-12);
}

TEST(LoopSequence, TimeOrderAndDisplacementMapping) {
  const PulseSequence seq = loop_sequence(0.5, 0.7, CollectiveJz{}, CollectiveJz{});
  ASSERT_EQ(seq.size(), 4u);
  const double s = 1.0 / std::sqrt(2.0);
  const Complex expected[4] = {Complex{0.7 * s, 0.0}, Complex{0.0, -0.5 * s}, Complex{-0.7 * s, 0.0},
                               Complex{0.0, 0.5 * s}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_LT(std::abs(std::get<ConditionalDisplacement>(seq[k]).beta - expected[k]), 1e-15);
  }
}

TEST(LoopSequence, PulsesEqualQuadratureExponentials) {
  // exp(i k X W) and exp(i k P W) by direct exponentiation of the joint generator.
  const SpinRegister reg = SpinRegister::symmetric(2);
  const FockMode mode(24);
  const ComplexMatrix jz = collective_operator(reg, Axis::kZ);
  const ComplexMatrix x = quadrature(mode, Quadrature::kX);
  const ComplexMatrix p = quadrature(mode, Quadrature::kP);
  const double k = 0.4;
  const PulseSequence seq = loop_sequence(k, k, CollectiveJz{}, CollectiveJz{});
  const ComplexMatrix x_pulse = matrix_exponential(Complex{0.0, k} * tensor_product(jz, x));
  const ComplexMatrix p_pulse = matrix_exponential(Complex{0.0, k} * tensor_product(jz, p));
  // The truncated generators coincide, so the match is to rounding.
  EXPECT_LT(max_entry_norm(compose(reg, mode, {seq[3]}) - x_pulse), 1e-12);
  EXPECT_LT(max_entry_norm(compose(reg, mode, {seq[2]}) - p_pulse), 1e-12);
}

TEST(LoopSequence, NonlinearTopOracle) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const FockMode mode(32);
  const PulseSequence seq = loop_sequence(0.3, 0.3, CollectiveJz{}, CollectiveJz{});
  const int levels = trusted_fock_levels(mode, sequence_excursion(reg, seq));
  const Factorization f = factor_vibration(compose(reg, mode, seq), reg.dim(), mode.dim(), levels);
  EXPECT_GE(levels, 8);
  EXPECT_LT(f.residual, 1e-8);
  EXPECT_LT(distance_up_to_global_phase(f.spin_unitary, jz_twist(reg, 0.09)), 1e-8);
  // [A, B] is central, so no global phase is left over either.
  EXPECT_LT(max_entry_norm(f.spin_unitary - jz_twist(reg, 0.09)), 1e-8);
}

TEST(LoopSequence, SingleIonThetaPiIsGlobalPhase) {
  const SpinRegister reg = SpinRegister::full(1);
  const FockMode mode(32);
  const double k = std::sqrt(std::numbers::pi);
  const PulseSequence seq = loop_sequence(k, k, SingleIon{0}, SingleIon{0});
  const Factorization f = factor_vibration(compose(reg, mode, seq), 2, mode.dim(),
                                           trusted_fock_levels(mode, sequence_excursion(reg, seq)));
  EXPECT_LT(f.residual, 1e-8);
  EXPECT_LT(distance_up_to_global_phase(f.spin_unitary, ComplexMatrix::Identity(2, 2)), 1e-8);
  EXPECT_LT(std::abs(f.spin_unitary(0, 0) - std::polar(1.0, -std::numbers::pi / 4.0)), 1e-8);
}

TEST(LoopSequence, ZeroKappaIsJointIdentity) {
  const SpinRegister reg = SpinRegister::symmetric(3);
  const FockMode mode(16);
  const ComplexMatrix u = compose(reg, mode, loop_sequence(0.0, 0.4, CollectiveJz{}, CollectiveJz{}));
  EXPECT_LT(max_entry_norm(u - ComplexMatrix::Identity(u.rows(), u.cols())), 1e-10);
}

TEST(FactorVibration, ExactProductHasZeroResidual) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const ComplexMatrix us = carrier_rotation(reg, Axis::kX, 0.8);
  const Factorization f = factor_vibration(tensor_product(us, ComplexMatrix::Identity(10, 10)), 3, 10);
  EXPECT_LT(f.residual, 1e-15);
  EXPECT_EQ(f.spin_unitary, us);
  EXPECT_EQ(f.trusted_levels, 8);
  EXPECT_THROW(factor_vibration(ComplexMatrix::Identity(30, 30), 3, 11), DimensionError);
  EXPECT_THROW(factor_vibration(ComplexMatrix::Identity(30, 30), 3, 10, 0), std::invalid_argument);
}

TEST(FactorVibration, SeesLeakageOutOfATrustedColumn) {
  // One trusted level still exposes a displacement through <n|U|0>, n > 0.
  const SpinRegister reg = SpinRegister::full(1);
  const FockMode mode(16);
  const ComplexMatrix u = conditional_displacement_unitary(reg, mode, 0.5, SingleIon{0});
  EXPECT_GT(factor_vibration(u, 2, mode.dim(), 1).residual, 0.1);
}

TEST(TrustedLevels, ShrinksWithExcursion) {
  const FockMode mode(32);
  EXPECT_EQ(trusted_fock_levels(mode, 0.0), 31);
  const int small = trusted_fock_levels(mode, 0.2);
  const int large = trusted_fock_levels(mode, 1.0);
  EXPECT_GT(small, large);
  EXPECT_GE(large, 1);
}

TEST(SequenceExcursion, LoopCorners) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const double s = 1.0 / std::sqrt(2.0);
  // Branch m = +-1 visits |p|, then the corner |p + x|.
  EXPECT_NEAR(sequence_excursion(reg, loop_sequence(0.3, 0.4, CollectiveJz{}, CollectiveJz{})),
              std::hypot(0.3, 0.4) * s, 1e-15);
}

TEST(VerifyNonlinearTop, SpecExamples) {
  const NonlinearTopReport a = verify_nonlinear_top(2, 0.3, 0.3, 32);
  EXPECT_TRUE(a.passes(1e-8));
  ASSERT_TRUE(a.extracted_theta.has_value());
  EXPECT_NEAR(*a.extracted_theta, 0.09, 1e-8);
  const NonlinearTopReport b = verify_nonlinear_top(4, 0.2, 0.4, 32);
  EXPECT_TRUE(b.passes(1e-8));
  EXPECT_NEAR(*b.extracted_theta, 0.08, 1e-8);
  for (double k : {0.2, 0.5, 1.0}) {
    const NonlinearTopReport one = verify_nonlinear_top(1, k, k, 32);
    EXPECT_LT(distance_up_to_global_phase(one.spin_unitary, ComplexMatrix::Identity(2, 2)), 1e-8);
    EXPECT_FALSE(one.extracted_theta.has_value());
  }
}

TEST(VerifyNonlinearTop, ThetaScalesWithKappaProduct) {
  for (double kx : {0.1, 0.3, 0.5}) {
    for (double kp : {0.1, 0.3, 0.5}) {
      const NonlinearTopReport r = verify_nonlinear_top(3, kx, kp, 32);
      ASSERT_TRUE(r.extracted_theta.has_value());
      EXPECT_NEAR(*r.extracted_theta, kx * kp, 1e-8);
      EXPECT_TRUE(r.passes(1e-8));
    }
  }
}

TEST(VerifyNonlinearTop, ReversedLoopNegatesTheta) {
  const NonlinearTopReport fwd = verify_nonlinear_top(2, 0.3, 0.4, 32);
  const NonlinearTopReport rev = verify_nonlinear_top(2, -0.3, 0.4, 32);
  EXPECT_NEAR(*rev.extracted_theta, -*fwd.extracted_theta, 1e-8);
  EXPECT_TRUE(rev.passes(1e-8));
}

TEST(VerifyNonlinearTop, PrintedOrderingDoesNotFactorize) {
  const NonlinearTopReport lit = verify_nonlinear_top(2, 0.3, 0.3, 32, LoopClosure::kRepeatedMomentum);
  EXPECT_GT(lit.residual, 0.1);
  const NonlinearTopReport pos = verify_nonlinear_top(2, 0.3, 0.3, 32, LoopClosure::kPositionClosing);
  EXPECT_GT(pos.residual, 0.1);
}

TEST(VibrationalIndependence, ReducedSpinActionAcrossModeStates) {
  for (int n : {1, 2, 3}) {
    const SpinRegister reg = SpinRegister::symmetric(n);
    const FockMode mode(32);
    const PulseSequence seq = loop_sequence(0.3, 0.4, CollectiveJz{}, CollectiveJz{});
    StateVector spin = spin_coherent_state(reg, 1.1, 0.4).vector;
    const StateVector target = jz_twist(reg, 0.12) * spin;
    for (const ReferenceKind& kind :
         {ReferenceKind{GroundState{}}, ReferenceKind{FockState{3}}, ReferenceKind{CoherentState{Complex{1.0, 0.0}}}}) {
      const StateVector phi = reference_state(mode, kind).vector;
      const StateVector out = evolve(reg, mode, seq, tensor_product(spin, phi));
      const StateVector reduced = reduce(out, phi, reg.dim());
      EXPECT_LT((reduced - target).norm(), 1e-8) << "N=" << n << " kind=" << kind.index();
      EXPECT_NEAR(reduced.norm(), 1.0, 1e-8);
    }
  }
}
