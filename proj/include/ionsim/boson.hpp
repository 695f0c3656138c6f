#pragma once

// Truncated vibrational mode, basis |0> ... |n_max>.

#include <variant>

#include "ionsim/tensor.hpp"

namespace ionsim {

class FockMode {
 public:
  static constexpr int kDefaultCutoff = 32;
  static constexpr int kMinCutoff = 4;

  explicit FockMode(int cutoff = kDefaultCutoff, double leakage_threshold = 1e-10);

  int cutoff() const { return cutoff_; }
  Index dim() const { return Index{cutoff_} + 1; }
  double leakage_threshold() const { return leakage_threshold_; }
  /// Largest displacement amplitude accepted: sqrt(cutoff) / 2.
  double excursion_limit() const;

 private:
  int cutoff_;
  double leakage_threshold_;
};

enum class Quadrature { kX, kP };

ComplexMatrix annihilation(const FockMode& mode);

/// X = (a + a^dagger)/sqrt(2) or P = -i(a - a^dagger)/sqrt(2), truncated.
ComplexMatrix quadrature(const FockMode& mode, Quadrature which);

/// exp(beta a^dagger - conj(beta) a) of the truncated generator; exactly unitary.
/// Throws TruncationError when |beta| exceeds the mode's excursion limit.
ComplexMatrix displacement(const FockMode& mode, Complex beta);

struct GroundState {};
struct FockState {
  int n = 0;
};
struct CoherentState {
  Complex alpha;
};
using ReferenceKind = std::variant<GroundState, FockState, CoherentState>;

struct ModeState {
  StateVector vector;
  double leakage = 0.0;
  bool leakage_flagged = false;  // leakage above the mode's threshold
};

/// Population in the top two Fock levels.
double leakage(const FockMode& mode, const StateVector& state);

ModeState reference_state(const FockMode& mode, const ReferenceKind& kind);

/// <a^dagger a>.
double mean_occupation(const StateVector& state);

}  // namespace ionsim
