#pragma once

// Collective and single-ion spin operators for N two-level ions.
//
// Single-ion operators use the spin-1/2 normalization
//   sigma_x = (s+ + s-)/2,  sigma_y = -i(s+ - s-)/2,  sigma_z = (|e><e| - |g><g|)/2
// so collective Jz has eigenvalues -N/2 ... N/2.
//
// Full representation: basis index is the integer code of the bit string
// b_{N-1}...b_0, ion i <-> bit i, bit 1 = excited.
// Symmetric representation: |j,m>, j = N/2, m ascending from -j.

#include <array>
#include <cstdint>
#include <vector>

#include "ionsim/tensor.hpp"

namespace ionsim {

enum class Representation { kSymmetric, kFull };
enum class Axis { kX, kY, kZ };

class SpinRegister {
 public:
  static constexpr int kMaxFullIons = 12;
  static constexpr int kMaxSymmetricIons = static_cast<int>(kMaxExponentialDimension) - 1;

  static SpinRegister symmetric(int n_ions) { return {n_ions, Representation::kSymmetric}; }
  static SpinRegister full(int n_ions) { return {n_ions, Representation::kFull}; }

  SpinRegister(int n_ions, Representation representation);

  int n_ions() const { return n_ions_; }
  Representation representation() const { return representation_; }
  bool is_symmetric() const { return representation_ == Representation::kSymmetric; }
  bool is_full() const { return representation_ == Representation::kFull; }
  Index dim() const;
  /// Total spin quantum number j = N/2 (of the symmetric sector).
  double j() const { return 0.5 * n_ions_; }

  friend bool operator==(const SpinRegister&, const SpinRegister&) = default;

 private:
  int n_ions_;
  Representation representation_;
};

struct SpinState {
  SpinRegister reg;
  StateVector vector;
};

/// Collective J_axis = sum_i sigma_axis^(i).
ComplexMatrix collective_operator(const SpinRegister& reg, Axis axis);

/// sigma_axis on one ion, identity elsewhere. Full representation only.
ComplexMatrix single_ion_operator(const SpinRegister& reg, int ion, Axis axis);

/// Diagonal of the collective Jz in the register's basis.
std::vector<double> jz_eigenvalues(const SpinRegister& reg);

/// exp(-i angle W), W the collective operator for the axis.
ComplexMatrix carrier_rotation(const SpinRegister& reg, Axis axis, double angle);

/// exp(-i angle W), W = sum of sigma_axis over `targets`.
/// A proper subset of ions requires the Full representation.
ComplexMatrix carrier_rotation(const SpinRegister& reg, Axis axis, double angle,
                               const std::vector<int>& targets);

/// The 2x2 single-ion rotation exp(-i angle sigma_axis) in the (g, e) basis.
Eigen::Matrix2cd single_ion_rotation(Axis axis, double angle);

/// Applies a 2x2 unitary (basis g, e) to one ion of a Full-representation vector in place.
void apply_single_ion_unitary(StateVector& state, int n_ions, int ion,
                              const Eigen::Matrix2cd& u);

/// |j,m> of a Symmetric register.
SpinState dicke_state(const SpinRegister& reg, double m);

/// exp[i theta (Jx sin phi - Jy cos phi)] |j,-j>.
///
/// The resulting mean spin points along -(sin theta cos phi, sin theta sin phi, cos theta);
/// theta = 0 is |j,-j>.
SpinState spin_coherent_state(const SpinRegister& reg, double theta, double phi);

/// Labels (theta, phi) of the coherent state whose mean spin points along `direction`.
std::array<double, 2> coherent_label_toward(const std::array<double, 3>& direction);

/// (<Jx>, <Jy>, <Jz>) / j.
std::array<double, 3> mean_spin_direction(const SpinState& state);

struct HusimiMoments {
  double total = 0.0;                       // midpoint-rule integral of Q over the sphere
  std::array<double, 3> centroid{};         // Q-weighted mean of the label direction
  double second_moment = 0.0;               // Q-weighted mean of |n - centroid|^2
};

/// Q(theta, phi) = (2j+1)/(4 pi) |<gamma(theta, phi)|psi>|^2 on a midpoint theta grid
/// and a uniform phi grid over [0, 2 pi).
struct HusimiGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> q;  // theta-major

  double at(int it, int ip) const { return q[static_cast<std::size_t>(it) * n_phi + ip]; }
  HusimiMoments moments() const;
};

/// Precomputes the coherent-state columns for a grid so that repeated
/// snapshots of one register cost a single pass over the grid each.
class HusimiProjector {
 public:
  HusimiProjector(const SpinRegister& reg, int n_theta, int n_phi);
  HusimiGrid evaluate(const SpinState& state) const;

 private:
  SpinRegister reg_;
  int n_theta_;
  int n_phi_;
  std::vector<StateVector> columns_;  // exp(-i theta Jy)|j,-j> per theta row
};

HusimiGrid husimi_grid(const SpinState& state, int n_theta, int n_phi);

/// i.i.d. Jz outcomes drawn by inverse CDF over m ascending.
std::vector<double> measure_jz(const SpinState& state, std::uint64_t seed, std::size_t n_samples);

/// |j,m> -> uniform superposition of bit strings with Hamming weight m + j.
SpinState embed_symmetric_into_full(const SpinState& state);

}  // namespace ionsim
