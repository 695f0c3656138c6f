#pragma once

// Conditional-displacement pulses on the joint spin (x) mode space and the
// four-pulse commutator loop that turns them into spin-only unitaries.
//
// A conditional displacement exp((beta a^dagger - beta* a) (x) W) with W
// diagonal in the spin basis is block diagonal: the mode block for a spin
// basis state with W-eigenvalue w is the ordinary displacement D(beta w).
// Those blocks are the only displacement matrices ever exponentiated.

#include <optional>
#include <variant>
#include <vector>

#include "ionsim/boson.hpp"
#include "ionsim/spin.hpp"
#include "ionsim/tensor.hpp"

namespace ionsim {

/// W = collective Jz over every ion.
struct CollectiveJz {};
/// W = sigma_z of one ion (Full representation).
struct SingleIon {
  int ion = 0;
};
/// W = sum of sigma_z over a subset of ions (Full representation).
struct IonSetJz {
  std::vector<int> ions;
};
using SpinWeight = std::variant<CollectiveJz, SingleIon, IonSetJz>;

struct ConditionalDisplacement {
  Complex beta;
  SpinWeight weight;
};

struct CarrierPulse {
  Axis axis = Axis::kX;
  double angle = 0.0;
  std::optional<std::vector<int>> targets;  // empty: every ion
};

using Pulse = std::variant<ConditionalDisplacement, CarrierPulse>;

/// Pulses in time order: the first element acts first on the state.
using PulseSequence = std::vector<Pulse>;

/// How the fourth pulse of a loop is chosen.
enum class LoopClosure {
  /// e^{A} e^{B} e^{-A} e^{-B}: closes in phase space and leaves e^{[A,B]}.
  kCommutator,
  /// e^{A} e^{B} e^{-A} e^{B}: repeats the momentum kick and leaves the
  /// net conditional displacement e^{2B} entangling spin and mode.
  kRepeatedMomentum,
  /// e^{A} e^{B} e^{-A} e^{i kp X W_B}: closes with a position kick instead.
  kPositionClosing,
};

/// Diagonal of W in the register's spin basis.
std::vector<double> weight_eigenvalues(const SpinRegister& reg, const SpinWeight& weight);

/// Throws if the pulse cannot act on this register and mode.
void validate_pulse(const SpinRegister& reg, const FockMode& mode, const Pulse& pulse);

/// exp((beta a^dagger - beta* a) (x) W), assembled block by block.
ComplexMatrix conditional_displacement_unitary(const SpinRegister& reg, const FockMode& mode,
                                               Complex beta, const SpinWeight& weight);

/// U = U_k ... U_2 U_1 for the sequence (p_1, ..., p_k).
ComplexMatrix compose(const SpinRegister& reg, const FockMode& mode, const PulseSequence& seq);

/// Applies the sequence to a joint state without forming the joint unitary.
StateVector evolve(const SpinRegister& reg, const FockMode& mode, const PulseSequence& seq,
                   StateVector joint_state);

/// Four conditional displacements whose product is
///   exp(i kx X W_A) exp(i kp P W_B) exp(-i kx X W_A) exp(-i kp P W_B)
/// (rightmost factor first in time) for the commutator closure, which equals
/// exp(-i kx kp W_A W_B) (x) I exactly when [X, P] = i.
/// exp(i k X W) is a conditional displacement with beta = i k / sqrt(2) and
/// exp(i k P W) one with beta = -k / sqrt(2).
PulseSequence loop_sequence(double kappa_x, double kappa_p, const SpinWeight& weight_a,
                            const SpinWeight& weight_b,
                            LoopClosure closure = LoopClosure::kCommutator);

/// Upper bound on the phase-space radius the mode reaches during the sequence
/// from any spin branch.
double sequence_excursion(const SpinRegister& reg, const PulseSequence& seq);

/// Number of low Fock levels n for which a displacement of the given radius
/// keeps the amplitude reaching the top two levels at or below the tolerance.
/// Identities that rely on [X, P] = i hold to that accuracy on these levels.
int trusted_fock_levels(const FockMode& mode, double excursion,
                        double amplitude_tolerance = 1e-12);

struct Factorization {
  ComplexMatrix spin_unitary;  // vacuum block <0|U|0>
  double residual = 0.0;
  int trusted_levels = 0;
};

/// Measures how far a joint unitary is from U_spin (x) I on input Fock levels
/// n' < trusted_levels: the larger of the worst diagonal-block phase-invariant
/// distance to the vacuum block and the worst max-entry norm of an
/// off-diagonal block <n|U|n'>, n over every output level.
/// `trusted_levels` defaults to boson_dim - 2.
Factorization factor_vibration(const ComplexMatrix& joint, Index spin_dim, Index boson_dim,
                               std::optional<int> trusted_levels = std::nullopt);

struct NonlinearTopReport {
  int n_ions = 0;
  double kappa_x = 0.0;
  double kappa_p = 0.0;
  int cutoff = 0;
  LoopClosure closure = LoopClosure::kCommutator;
  double theta = 0.0;                    // kappa_x * kappa_p
  std::optional<double> extracted_theta; // from diagonal phases, needs N >= 2
  double residual = 0.0;
  int trusted_levels = 0;
  double global_phase = 0.0;
  std::vector<double> m_values;
  std::vector<double> phase_errors;      // per m, against exp(-i theta m^2)
  double max_phase_error = 0.0;
  double off_diagonal_max = 0.0;
  ComplexMatrix spin_unitary;

  bool passes(double tolerance) const {
    return residual < tolerance && max_phase_error < tolerance && off_diagonal_max < tolerance;
  }
};

/// Builds the loop with collective Jz weights on a Symmetric register,
/// factors out the mode and compares the spin part with exp(-i theta Jz^2).
NonlinearTopReport verify_nonlinear_top(int n_ions, double kappa_x, double kappa_p, int cutoff,
                                        LoopClosure closure = LoopClosure::kCommutator);

}  // namespace ionsim
