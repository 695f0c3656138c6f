#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "ionsim/errors.hpp"
#include "ionsim/spin.hpp"
#include "ionsim/tensor.hpp"
#include "oracles.hpp"

using namespace ionsim;

namespace {

ComplexMatrix random_matrix(Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = Complex{g(rng), g(rng)} * scale;
  }
  return m;
}

ComplexMatrix random_anti_hermitian(Index n, std::mt19937_64& rng, double scale) {
  const ComplexMatrix a = random_matrix(n, rng, scale);
  return (a - a.adjoint()) * 0.5;
}

}  // namespace

TEST(MatrixExponential, ZeroGivesIdentity) {
  const ComplexMatrix u = matrix_exponential(ComplexMatrix::Zero(4, 4));
  EXPECT_EQ(u, ComplexMatrix::Identity(4, 4));
}

TEST(MatrixExponential, PlaneRotation) {
  const double t = std::numbers::pi / 2.0;
  ComplexMatrix g(2, 2);
  g << 0.0, -t, t, 0.0;
  const ComplexMatrix u = matrix_exponential(g);
  ComplexMatrix expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LT(max_entry_norm(u - expected), 1e-15);
}

TEST(MatrixExponential, SpinOneQuarterTurnMatchesWignerColumn) {
  const SpinRegister reg = SpinRegister::symmetric(2);
  const ComplexMatrix u = matrix_exponential(Complex{0.0, -std::numbers::pi / 2.0} * collective_operator(reg, Axis::kY));
  const double expected[3] = {0.5, -1.0 / std::sqrt(2.0), 0.5};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(u(k, 0).real(), expected[k], 1e-14);
    EXPECT_NEAR(u(k, 0).imag(), 0.0, 1e-14);
    EXPECT_NEAR(u(k, 0).real(), oracle::wigner_d(1.0, k - 1.0, -1.0, std::numbers::pi / 2.0), 1e-14);
  }
}

TEST(MatrixExponential, AgreesWithPadeReference) {
  std::mt19937_64 rng(11);
  for (Index n : {2, 5, 16, 40}) {
    for (double scale : {0.05, 0.5, 2.0}) {
      const ComplexMatrix g = random_matrix(n, rng, scale / std::sqrt(static_cast<double>(n)));
      const ComplexMatrix ours = matrix_exponential(g);
      const ComplexMatrix ref = g.exp();
      EXPECT_LT(max_entry_norm(ours - ref), 1e-12 * std::max(1.0, max_entry_norm(ref))) << "n=" << n << " scale=" << scale;
    }
  }
}

TEST(MatrixExponential, AntiHermitianIsUnitaryAndInvertible) {
  std::mt19937_64 rng(5);
  for (Index n : {1, 3, 17, 64}) {
    const ComplexMatrix g = random_anti_hermitian(n, rng, 1.0);
    const ComplexMatrix u = matrix_exponential(g);
    EXPECT_TRUE(is_unitary(u));
    const ComplexMatrix back = u * matrix_exponential(-g);
    EXPECT_LT(max_entry_norm(back - ComplexMatrix::Identity(n, n)), 1e-10);
  }
}

TEST(MatrixExponential, LargeNormStillUnitary) {
  std::mt19937_64 rng(9);
  const ComplexMatrix g = random_anti_hermitian(30, rng, 20.0);
  EXPECT_LT(unitarity_defect(matrix_exponential(g)), 1e-10);
}

TEST(MatrixExponential, BlockDiagonalFactorizes) {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_anti_hermitian(4, rng, 1.0);
  const ComplexMatrix b = random_matrix(3, rng, 0.4);
  ComplexMatrix g = ComplexMatrix::Zero(7, 7);
  g.block(0, 0, 4, 4) = a;
  g.block(4, 4, 3, 3) = b;
  const ComplexMatrix u = matrix_exponential(g);
  EXPECT_LT(max_entry_norm(u.block(0, 0, 4, 4) - matrix_exponential(a)), 1e-12);
  EXPECT_LT(max_entry_norm(u.block(4, 4, 3, 3) - matrix_exponential(b)), 1e-12);
  EXPECT_LT(max_entry_norm(u.block(0, 4, 4, 3)), 1e-12);
  EXPECT_LT(max_entry_norm(u.block(4, 0, 3, 4)), 1e-12);
}

TEST(MatrixExponential, DiagonalInputUsesExactPhases) {
  ComplexMatrix g = ComplexMatrix::Zero(3, 3);
  g(0, 0) = Complex{0.0, 1.3};
  g(1, 1) = Complex{-0.2, 0.0};
  g(2, 2) = Complex{0.0, -40.0};
  const ComplexMatrix u = matrix_exponential(g);
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(u(i, i), std::exp(g(i, i)));
}

TEST(MatrixExponential, RejectsBadInput) {
  EXPECT_THROW(matrix_exponential(ComplexMatrix::Zero(2, 3)), DimensionError);
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(matrix_exponential(g), NumericError);
  g(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(matrix_exponential(g), NumericError);
}

TEST(TensorProduct, IdentityExamples) {
  EXPECT_EQ(tensor_product(ComplexMatrix(ComplexMatrix::Identity(2, 2)), ComplexMatrix(ComplexMatrix::Identity(3, 3))), ComplexMatrix::Identity(6, 6));
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_matrix(3, rng, 1.0);
  EXPECT_EQ(tensor_product(a, ComplexMatrix::Identity(1, 1)), a);
}

TEST(TensorProduct, DiagonalExample) {
  ComplexMatrix sz = ComplexMatrix::Zero(2, 2);
  sz(0, 0) = 0.5;
  sz(1, 1) = -0.5;
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 0.5, 1.0, -0.5, -1.0;
  EXPECT_EQ(tensor_product(sz, d), expected);
}

TEST(TensorProduct, IndexLayoutAndAssociativity) {
  std::mt19937_64 rng(2);
  ComplexMatrix a = random_matrix(2, rng, 1.0);
  ComplexMatrix b(3, 2);
  b.setRandom();
  ComplexMatrix c(2, 3);
  c.setRandom();
  const ComplexMatrix ab = tensor_product(a, b);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) EXPECT_EQ(ab(i * b.rows() + k, j * b.cols() + l), a(i, j) * b(k, l));
  EXPECT_LT(max_entry_norm(tensor_product(tensor_product(a, b), c) - tensor_product(a, tensor_product(b, c))), 1e-15);
}

TEST(TensorProduct, VectorsMatchMatrices) {
  StateVector u(2), v(3);
  u << Complex{1.0, 2.0}, Complex{0.0, -1.0};
  v << 1.0, Complex{0.5, 0.5}, -2.0;
  const StateVector uv = tensor_product(u, v);
  const ComplexMatrix as_matrix = tensor_product(ComplexMatrix(u), ComplexMatrix(v));
  EXPECT_EQ(uv, as_matrix.col(0));
}

TEST(TensorProduct, GuardRejectsHugeResult) {
  EXPECT_THROW(tensor_product(ComplexMatrix(ComplexMatrix::Identity(91, 91)), ComplexMatrix(ComplexMatrix::Identity(91, 91))), DimensionError);
}

TEST(GlobalPhaseDistance, Examples) {
  std::mt19937_64 rng(4);
  const ComplexMatrix u = matrix_exponential(random_anti_hermitian(5, rng, 1.0));
  EXPECT_LT(distance_up_to_global_phase(u, u), 1e-14);
  EXPECT_LT(distance_up_to_global_phase(u, std::polar(1.0, std::numbers::pi / 4.0) * u), 1e-14);
  ComplexMatrix z = ComplexMatrix::Identity(2, 2);
  z(1, 1) = -1.0;
  EXPECT_NEAR(distance_up_to_global_phase(ComplexMatrix::Identity(2, 2), z), 2.0, 1e-15);
}

TEST(GlobalPhaseDistance, SymmetricAndMatchesClosedForm) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix u = matrix_exponential(random_anti_hermitian(6, rng, 1.0));
    const ComplexMatrix v = matrix_exponential(random_anti_hermitian(6, rng, 1.0));
    const double d = distance_up_to_global_phase(u, v);
    EXPECT_NEAR(d, distance_up_to_global_phase(v, u), 1e-13);
    const double closed = std::sqrt(std::max(0.0, 12.0 - 2.0 * std::abs((u.adjoint() * v).trace())));
    EXPECT_NEAR(d, closed, 1e-10);
  }
}

TEST(GlobalPhaseDistance, ResolvesTinyDifferences) {
  // The closed form loses half its digits here; the aligned difference does not.
  ComplexMatrix v = ComplexMatrix::Identity(4, 4);
  v(2, 2) = std::polar(1.0, 1e-9);
  const double d = distance_up_to_global_phase(ComplexMatrix::Identity(4, 4), v);
  EXPECT_GT(d, 0.5e-9);
  EXPECT_LT(d, 1.5e-9);
}

TEST(GlobalPhaseDistance, RejectsMismatch) {
  EXPECT_THROW(distance_up_to_global_phase(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST(Expectation, RealPartOfQuadraticForm) {
  ComplexMatrix op = ComplexMatrix::Zero(2, 2);
  op(0, 0) = 1.0;
  op(1, 1) = -1.0;
  StateVector v(2);
  v << 0.6, Complex{0.0, 0.8};
  EXPECT_NEAR(expectation(op, v), 0.36 - 0.64, 1e-15);
  EXPECT_TRUE(is_normalized(v));
}
