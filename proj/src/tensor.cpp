#include "ionsim/tensor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

double one_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

bool is_diagonal(const ComplexMatrix& a) {
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) {
      if (r != c && a(r, c) != Complex{}) return false;
    }
  }
  return true;
}

constexpr double kScaledNormBound = 0.5;
constexpr int kMaxTaylorTerms = 40;

}  // namespace

ComplexMatrix matrix_exponential(const ComplexMatrix& generator) {
  const Index n = generator.rows();
  if (n != generator.cols()) {
    throw DimensionError("matrix_exponential: matrix is " + std::to_string(n) + "x" +
                         std::to_string(generator.cols()) + ", expected square");
  }
  if (n < 1 || n > kMaxExponentialDimension) {
    throw DimensionError("matrix_exponential: dimension " + std::to_string(n) +
                         " outside [1, " + std::to_string(kMaxExponentialDimension) + "]");
  }
  if (!generator.allFinite()) {
    throw NumericError("matrix_exponential: non-finite entries");
  }

  if (is_diagonal(generator)) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) out(i, i) = std::exp(generator(i, i));
    return out;
  }

  const double norm = one_norm(generator);
  int squarings = 0;
  if (norm > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
  }
  const ComplexMatrix scaled = generator * std::ldexp(1.0, -squarings);

  ComplexMatrix sum = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 1; k <= kMaxTaylorTerms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    sum += term;
    if (one_norm(term) <= eps * one_norm(sum) * 0.25) break;
  }

  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > kMaxTensorDimension || cols > kMaxTensorDimension) {
    throw DimensionError("tensor_product: result " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " exceeds guard " +
                         std::to_string(kMaxTensorDimension));
  }
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  const Index dim = a.size() * b.size();
  if (dim > kMaxTensorDimension * kMaxTensorDimension) {
    throw DimensionError("tensor_product: vector dimension " + std::to_string(dim) +
                         " exceeds guard");
  }
  StateVector out(dim);
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double distance_up_to_global_phase(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != u.cols() || v.rows() != v.cols() || u.rows() != v.rows()) {
    throw DimensionError("distance_up_to_global_phase: operands must be square and equal size");
  }
  // For unitaries ||U - e^{i phi} V||_F^2 = 2d - 2 Re(e^{i phi} tr(U^dagger V)), minimized
  // at phi = -arg tr(U^dagger V). The aligned difference is formed explicitly;
  // the closed form would lose half the digits to cancellation near zero.
  const Complex overlap = (u.adjoint() * v).trace();
  const Complex align = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : Complex{1.0};
  return (u - align * v).norm();
}

double max_entry_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) {
    throw DimensionError("unitarity_defect: matrix is not square");
  }
  return max_entry_norm(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

double expectation(const ComplexMatrix& op, const StateVector& v) {
  if (op.cols() != v.size() || op.rows() != v.size()) {
    throw DimensionError("expectation: operator and state dimensions differ");
  }
  return v.dot(op * v).real();
}

}  // namespace ionsim
