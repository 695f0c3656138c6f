#include "ionsim/boson.hpp"

#include <cmath>
#include <string>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

// Rounding slack on the excursion guard so that amplitudes computed to land
// exactly on the limit are accepted.
constexpr double kGuardSlack = 1e-12;

void check_excursion(const FockMode& mode, double magnitude, const char* what) {
  if (magnitude > mode.excursion_limit() * (1.0 + kGuardSlack)) {
    throw TruncationError(std::string(what) + ": |beta| = " + std::to_string(magnitude) +
                          " exceeds sqrt(cutoff)/2 = " + std::to_string(mode.excursion_limit()) +
                          "; raise the cutoff");
  }
}

}  // namespace

FockMode::FockMode(int cutoff, double leakage_threshold)
    : cutoff_(cutoff), leakage_threshold_(leakage_threshold) {
  if (cutoff < kMinCutoff) {
    throw DimensionError("FockMode: cutoff must be at least " + std::to_string(kMinCutoff));
  }
  if (cutoff + 1 > kMaxExponentialDimension) {
    throw DimensionError("FockMode: cutoff too large");
  }
  if (!(leakage_threshold > 0.0)) {
    throw std::invalid_argument("FockMode: leakage threshold must be positive");
  }
}

double FockMode::excursion_limit() const { return 0.5 * std::sqrt(static_cast<double>(cutoff_)); }

ComplexMatrix annihilation(const FockMode& mode) {
  ComplexMatrix a = ComplexMatrix::Zero(mode.dim(), mode.dim());
  for (Index n = 1; n < mode.dim(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix quadrature(const FockMode& mode, Quadrature which) {
  const ComplexMatrix a = annihilation(mode);
  const ComplexMatrix ad = a.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  if (which == Quadrature::kX) return s * (a + ad);
  return Complex{0.0, -s} * (a - ad);
}

ComplexMatrix displacement(const FockMode& mode, Complex beta) {
  check_excursion(mode, std::abs(beta), "displacement");
  if (beta == Complex{}) return ComplexMatrix::Identity(mode.dim(), mode.dim());
  const ComplexMatrix a = annihilation(mode);
  return matrix_exponential(beta * a.adjoint() - std::conj(beta) * a);
}

double leakage(const FockMode& mode, const StateVector& state) {
  if (state.size() != mode.dim()) throw DimensionError("leakage: state size does not match the mode");
  return std::norm(state(mode.dim() - 1)) + std::norm(state(mode.dim() - 2));
}

ModeState reference_state(const FockMode& mode, const ReferenceKind& kind) {
  StateVector v = StateVector::Zero(mode.dim());
  if (std::holds_alternative<GroundState>(kind)) {
    v(0) = 1.0;
  } else if (const auto* fock = std::get_if<FockState>(&kind)) {
    if (fock->n < 0 || fock->n > mode.cutoff() - 2) {
      throw TruncationError("reference_state: Fock level " + std::to_string(fock->n) +
                            " outside [0, cutoff - 2]");
    }
    v(fock->n) = 1.0;
  } else {
    const Complex alpha = std::get<CoherentState>(kind).alpha;
    check_excursion(mode, std::abs(alpha), "reference_state");
    v = displacement(mode, alpha).col(0);
  }
  ModeState out{std::move(v), 0.0, false};
  out.leakage = leakage(mode, out.vector);
  out.leakage_flagged = out.leakage > mode.leakage_threshold();
  return out;
}

double mean_occupation(const StateVector& state) {
  double total = 0.0;
  for (Index n = 0; n < state.size(); ++n) total += static_cast<double>(n) * std::norm(state(n));
  return total;
}

}  // namespace ionsim
