#pragma once

// Applications of the conditional-displacement loop: cat states, the kicked
// top, readout-spin records and the two-ion Ising / controlled-phase gate.

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "ionsim/pulse.hpp"
#include "ionsim/spin.hpp"

namespace ionsim {

/// Kicked top with twist exp(-i (kappa / 2j) Jz^2) and kick exp(-i p Jy).
struct KickedTopParams {
  int two_j = 1;
  double kappa = 3.0;
  double p = std::numbers::pi / 2.0;

  double j() const { return 0.5 * two_j; }
};

/// A spin unitary obtained by composing pulses on the joint space and
/// factoring out the mode.
struct PulseBuiltUnitary {
  ComplexMatrix unitary;
  double residual = 0.0;
  int trusted_levels = 0;
  int cutoff = 0;
};

enum class Construction { kAuto, kPulses, kDirect };

// ---------------------------------------------------------------- cat state

struct CatStateReport {
  int n_ions = 0;
  Construction construction = Construction::kDirect;  // route actually taken
  std::optional<double> factorization_residual;       // pulse route only
  SpinState state;
  std::vector<double> x_populations;                  // over |j,m>_x, m ascending
  double population_minus = 0.0;                      // |j,-j>_x
  double population_plus = 0.0;                       // |j,+j>_x
  double other_max = 0.0;
  double relative_phase = 0.0;                        // arg(c_plus / c_minus)
  std::optional<double> expected_relative_phase;      // arg((-1)^j e^{i pi/2}), integer j only
};

/// Columns are |j,m>_x := exp(-i (pi/2) Jy)|j,m>, m ascending. Each column is
/// the Jx eigenvector of eigenvalue m with a positive real |j,-j> amplitude.
ComplexMatrix x_basis(const SpinRegister& reg);

/// |j,-j>_z, rotate by pi/2 about y, then apply exp(-i (pi/2) Jz^2).
/// kAuto uses the pulse route when the loop fits inside the trusted Fock
/// levels of `cutoff` and the direct exponential otherwise.
CatStateReport cat_state_protocol(int n_ions, Construction construction = Construction::kAuto,
                                  int cutoff = FockMode::kDefaultCutoff);

// ---------------------------------------------------------------- kicked top

/// exp(-i (kappa/2j) Jz^2) exp(-i p Jy); the kick acts first.
ComplexMatrix floquet_operator(const KickedTopParams& params);

struct TrajectoryRecord {
  int step = 0;
  double jx = 0.0;  // <Jx>/j
  double jy = 0.0;
  double jz = 0.0;
  double norm = 0.0;
  int husimi_index = -1;  // into Trajectory::husimi, -1 if none
};

struct HusimiOptions {
  int every = 1;
  int n_theta = 64;
  int n_phi = 128;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // steps + 1 entries, step 0 is the initial state
  std::vector<HusimiGrid> husimi;
  SpinState final_state;
};

Trajectory evolve_kicked_top(const KickedTopParams& params, const SpinState& initial, int steps,
                             std::optional<HusimiOptions> husimi = std::nullopt);

// ---------------------------------------------------------------- readout

/// exp(-i mu Jy sigma_z^(R)) by direct exponentiation; Jy sums the other ions.
ComplexMatrix readout_coupling_reference(const SpinRegister& reg, int readout_ion, double mu);

/// The same coupling from pulses: a collective x-rotation of the system ions
/// taking Jz to Jy, conjugating the loop with weights sigma_z^(R) and system Jz.
PulseBuiltUnitary readout_coupling(const SpinRegister& reg, int readout_ion, double mu,
                                   int cutoff = FockMode::kDefaultCutoff);

/// Applies exp(-i mu Jy sigma_z^(R)) to a Full-representation state as
/// R diag R^dagger with R a product of single-ion rotations.
void apply_readout_coupling(StateVector& state, int n_ions, int readout_ion, double mu);

/// One Floquet period on a Full-representation state of 2j ions.
void apply_floquet_full(StateVector& state, const KickedTopParams& params);

struct ReadoutPrep {
  double theta = 0.0;  // P(outcome 1) = sin^2(theta / 2)
  double phi = 0.0;
};

struct RecordConfig {
  KickedTopParams params;         // system ions: 2j, total ions 2j + 1
  int readout_ion = 0;
  double mu = 0.0;
  ReadoutPrep prep;
  double theta0 = 0.0;            // initial coherent state of the system ions
  double phi0 = 0.0;
  int steps = 0;
  std::uint64_t seed = 0;
};

struct MeasurementRecord {
  RecordConfig config;
  std::vector<int> bits;          // 1 = readout ion found excited
  std::vector<double> p_one;      // Born probability of bit 1 at each step
};

inline constexpr int kMaxRecordIons = 10;

/// Each step: one Floquet period on the system ions, readout prepared in
/// (theta_r, phi_r), coupling, projective sigma_z readout with collapse.
MeasurementRecord measurement_record(const RecordConfig& config);

// ---------------------------------------------------------------- gates

/// exp(-i chi sigma_z^(a) sigma_z^(b)) by direct exponentiation.
ComplexMatrix ising_reference(const SpinRegister& reg, int ion_a, int ion_b, double chi);

/// The loop with weights sigma_z^(a), sigma_z^(b) and kappa_x kappa_p = chi.
PulseBuiltUnitary ising_gate(const SpinRegister& reg, int ion_a, int ion_b, double chi,
                             int cutoff = FockMode::kDefaultCutoff,
                             LoopClosure closure = LoopClosure::kCommutator);

/// Full-register controlled phase: -1 on basis states with both ions excited.
ComplexMatrix controlled_phase_reference(const SpinRegister& reg, int ion_a, int ion_b);

/// exp(-i (pi/2) sigma_z^(a)) exp(-i (pi/2) sigma_z^(b)) times the pulse-built
/// Ising gate at chi = pi. Equals the controlled phase up to e^{i pi/4}.
PulseBuiltUnitary controlled_phase(const SpinRegister& reg, int ion_a, int ion_b,
                                   int cutoff = FockMode::kDefaultCutoff,
                                   LoopClosure closure = LoopClosure::kCommutator);

}  // namespace ionsim
