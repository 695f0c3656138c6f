#pragma once

// Dense complex linear algebra shared by every other module.
//
// Joint operators are always laid out with the spin factor as the slow
// (leftmost) tensor index and the vibrational mode as the fast index.

#include <complex>

#include <Eigen/Dense>

namespace ionsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Largest square matrix accepted by matrix_exponential.
inline constexpr Index kMaxExponentialDimension = 5000;
/// Largest row or column count produced by tensor_product.
inline constexpr Index kMaxTensorDimension = 8192;

/// exp(G) by scaling and squaring around a Taylor kernel.
///
/// G is scaled by 2^-s so that its 1-norm is at most 0.5, the Taylor series
/// is summed until the next term is below double rounding, and the result is
/// squared s times. Diagonal inputs are exponentiated entrywise.
///
/// Throws DimensionError for non-square or oversized input and NumericError
/// for non-finite entries.
ComplexMatrix matrix_exponential(const ComplexMatrix& generator);

/// Kronecker product; (A (x) B)[i*rB + k, j*cB + l] = A[i,j] * B[k,l].
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
StateVector tensor_product(const StateVector& a, const StateVector& b);

/// Frobenius distance between U and V minimized over a global phase:
/// sqrt(max(0, 2d - 2|tr(U^dagger V)|)). Intended for unitary inputs.
double distance_up_to_global_phase(const ComplexMatrix& u, const ComplexMatrix& v);

double max_entry_norm(const ComplexMatrix& a);

/// max-entry |U^dagger U - I|.
double unitarity_defect(const ComplexMatrix& u);

inline bool is_unitary(const ComplexMatrix& u, double tolerance = 1e-10) {
  return unitarity_defect(u) <= tolerance;
}

inline bool is_normalized(const StateVector& v, double tolerance = 1e-10) {
  return std::abs(v.norm() - 1.0) <= tolerance;
}

/// Re <v|op|v>.
double expectation(const ComplexMatrix& op, const StateVector& v);

}  // namespace ionsim
