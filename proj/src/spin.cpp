#include "ionsim/spin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"

namespace ionsim {

namespace {

constexpr double kAngleSlack = 1e-12;

void require_symmetric(const SpinRegister& reg, const char* what) {
  if (!reg.is_symmetric()) {
    throw RepresentationError(std::string(what) + ": requires the Symmetric representation");
  }
}

void require_full(const SpinRegister& reg, const char* what) {
  if (!reg.is_full()) {
    throw RepresentationError(std::string(what) + ": requires the Full representation");
  }
}

void check_ion(const SpinRegister& reg, int ion) {
  if (ion < 0 || ion >= reg.n_ions()) {
    throw IndexError("ion index " + std::to_string(ion) + " outside [0, " +
                     std::to_string(reg.n_ions()) + ")");
  }
}

// J+ in the |j,m> basis, m ascending.
ComplexMatrix symmetric_raising(int n_ions) {
  const double j = 0.5 * n_ions;
  ComplexMatrix raise = ComplexMatrix::Zero(n_ions + 1, n_ions + 1);
  for (int k = 0; k < n_ions; ++k) {
    const double m = -j + k;
    raise(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  return raise;
}

// Adds coefficient * sigma_axis^(ion) into a Full-representation matrix.
void accumulate_single_ion(ComplexMatrix& out, int ion, Axis axis, double coefficient) {
  const Index bit = Index{1} << ion;
  for (Index code = 0; code < out.rows(); ++code) {
    const bool excited = (code & bit) != 0;
    switch (axis) {
      case Axis::kZ:
        out(code, code) += coefficient * (excited ? 0.5 : -0.5);
        break;
      case Axis::kX:
        out(code ^ bit, code) += coefficient * 0.5;
        break;
      case Axis::kY:
        // <e|sigma_y|g> = -i/2, <g|sigma_y|e> = +i/2
        out(code ^ bit, code) += coefficient * (excited ? Complex{0.0, 0.5} : Complex{0.0, -0.5});
        break;
    }
  }
}

Eigen::Matrix2cd pauli_half(Axis axis) {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  switch (axis) {
    case Axis::kX:
      s(0, 1) = 0.5;
      s(1, 0) = 0.5;
      break;
    case Axis::kY:
      s(0, 1) = Complex{0.0, 0.5};
      s(1, 0) = Complex{0.0, -0.5};
      break;
    case Axis::kZ:
      s(0, 0) = -0.5;
      s(1, 1) = 0.5;
      break;
  }
  return s;
}

double binomial(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

SpinRegister::SpinRegister(int n_ions, Representation representation)
    : n_ions_(n_ions), representation_(representation) {
  if (n_ions < 1) throw DimensionError("SpinRegister: need at least one ion");
  const int limit = representation == Representation::kFull ? kMaxFullIons : kMaxSymmetricIons;
  if (n_ions > limit) {
    throw DimensionError("SpinRegister: " + std::to_string(n_ions) + " ions exceeds the limit of " +
                         std::to_string(limit) + " for this representation");
  }
}

Index SpinRegister::dim() const {
  return is_symmetric() ? Index{n_ions_} + 1 : Index{1} << n_ions_;
}

ComplexMatrix collective_operator(const SpinRegister& reg, Axis axis) {
  const Index dim = reg.dim();
  if (reg.is_symmetric()) {
    if (axis == Axis::kZ) {
      ComplexMatrix jz = ComplexMatrix::Zero(dim, dim);
      for (Index k = 0; k < dim; ++k) jz(k, k) = -reg.j() + static_cast<double>(k);
      return jz;
    }
    const ComplexMatrix raise = symmetric_raising(reg.n_ions());
    const ComplexMatrix lower = raise.adjoint();
    if (axis == Axis::kX) return 0.5 * (raise + lower);
    return Complex{0.0, -0.5} * (raise - lower);
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int ion = 0; ion < reg.n_ions(); ++ion) accumulate_single_ion(out, ion, axis, 1.0);
  return out;
}

ComplexMatrix single_ion_operator(const SpinRegister& reg, int ion, Axis axis) {
  require_full(reg, "single_ion_operator");
  check_ion(reg, ion);
  ComplexMatrix out = ComplexMatrix::Zero(reg.dim(), reg.dim());
  accumulate_single_ion(out, ion, axis, 1.0);
  return out;
}

std::vector<double> jz_eigenvalues(const SpinRegister& reg) {
  std::vector<double> values(static_cast<std::size_t>(reg.dim()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    const int weight = reg.is_symmetric() ? static_cast<int>(k) : std::popcount(k);
    values[k] = weight - reg.j();
  }
  return values;
}

Eigen::Matrix2cd single_ion_rotation(Axis axis, double angle) {
  const ComplexMatrix generator = Complex{0.0, -angle} * ComplexMatrix(pauli_half(axis));
  return matrix_exponential(generator);
}

ComplexMatrix carrier_rotation(const SpinRegister& reg, Axis axis, double angle) {
  if (reg.is_symmetric()) {
    return matrix_exponential(Complex{0.0, -angle} * collective_operator(reg, axis));
  }
  std::vector<int> all(static_cast<std::size_t>(reg.n_ions()));
  for (int i = 0; i < reg.n_ions(); ++i) all[static_cast<std::size_t>(i)] = i;
  return carrier_rotation(reg, axis, angle, all);
}

ComplexMatrix carrier_rotation(const SpinRegister& reg, Axis axis, double angle,
                               const std::vector<int>& targets) {
  std::vector<bool> targeted(static_cast<std::size_t>(reg.n_ions()), false);
  for (int ion : targets) {
    check_ion(reg, ion);
    if (targeted[static_cast<std::size_t>(ion)]) {
      throw std::invalid_argument("carrier_rotation: ion " + std::to_string(ion) + " listed twice");
    }
    targeted[static_cast<std::size_t>(ion)] = true;
  }
  const bool all_targeted = std::ranges::all_of(targeted, [](bool t) { return t; });
  if (reg.is_symmetric()) {
    if (!all_targeted) {
      throw RepresentationError("carrier_rotation: ion subsets need the Full representation");
    }
    return carrier_rotation(reg, axis, angle);
  }

  // Ions do not interact, so exp(-i a sum_i sigma_i) factors into single-ion
  // rotations; ion N-1 is the slowest Kronecker factor.
  const ComplexMatrix local = single_ion_rotation(axis, angle);
  const ComplexMatrix idle = ComplexMatrix::Identity(2, 2);
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int ion = reg.n_ions() - 1; ion >= 0; --ion) {
    out = tensor_product(out, targeted[static_cast<std::size_t>(ion)] ? local : idle);
  }
  return out;
}

void apply_single_ion_unitary(StateVector& state, int n_ions, int ion,
                              const Eigen::Matrix2cd& u) {
  const Index bit = Index{1} << ion;
  if (ion < 0 || ion >= n_ions) throw IndexError("apply_single_ion_unitary: ion out of range");
  if (state.size() != (Index{1} << n_ions)) {
    throw DimensionError("apply_single_ion_unitary: state size does not match 2^N");
  }
  for (Index code = 0; code < state.size(); ++code) {
    if (code & bit) continue;
    const Complex g = state(code);
    const Complex e = state(code | bit);
    state(code) = u(0, 0) * g + u(0, 1) * e;
    state(code | bit) = u(1, 0) * g + u(1, 1) * e;
  }
}

SpinState dicke_state(const SpinRegister& reg, double m) {
  require_symmetric(reg, "dicke_state");
  const double k = m + reg.j();
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 0 || rounded > reg.n_ions()) {
    throw std::invalid_argument("dicke_state: m = " + std::to_string(m) + " is not a valid projection");
  }
  StateVector v = StateVector::Zero(reg.dim());
  v(static_cast<Index>(rounded)) = 1.0;
  return {reg, std::move(v)};
}

SpinState spin_coherent_state(const SpinRegister& reg, double theta, double phi) {
  require_symmetric(reg, "spin_coherent_state");
  if (theta < -kAngleSlack || theta > std::numbers::pi + kAngleSlack) {
    throw std::invalid_argument("spin_coherent_state: theta must lie in [0, pi]");
  }
  const ComplexMatrix generator =
      Complex{0.0, theta} * (std::sin(phi) * collective_operator(reg, Axis::kX) -
                             std::cos(phi) * collective_operator(reg, Axis::kY));
  const ComplexMatrix rotation = matrix_exponential(generator);
  return {reg, rotation.col(0)};
}

std::array<double, 2> coherent_label_toward(const std::array<double, 3>& direction) {
  const double norm = std::hypot(direction[0], direction[1], direction[2]);
  if (!(norm > 0.0)) throw std::invalid_argument("coherent_label_toward: zero direction");
  const double nx = -direction[0] / norm;
  const double ny = -direction[1] / norm;
  const double nz = -direction[2] / norm;
  const double theta = std::acos(std::clamp(nz, -1.0, 1.0));
  double phi = std::atan2(ny, nx);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {theta, phi};
}

std::array<double, 3> mean_spin_direction(const SpinState& state) {
  const double j = state.reg.j();
  return {expectation(collective_operator(state.reg, Axis::kX), state.vector) / j,
          expectation(collective_operator(state.reg, Axis::kY), state.vector) / j,
          expectation(collective_operator(state.reg, Axis::kZ), state.vector) / j};
}

HusimiMoments HusimiGrid::moments() const {
  const double d_theta = std::numbers::pi / n_theta;
  const double d_phi = 2.0 * std::numbers::pi / n_phi;
  HusimiMoments out;
  std::array<double, 3> first{};
  for (int it = 0; it < n_theta; ++it) {
    const double st = std::sin(theta[static_cast<std::size_t>(it)]);
    const double ct = std::cos(theta[static_cast<std::size_t>(it)]);
    for (int ip = 0; ip < n_phi; ++ip) {
      const double w = at(it, ip) * st * d_theta * d_phi;
      out.total += w;
      first[0] += w * st * std::cos(phi[static_cast<std::size_t>(ip)]);
      first[1] += w * st * std::sin(phi[static_cast<std::size_t>(ip)]);
      first[2] += w * ct;
    }
  }
  for (int a = 0; a < 3; ++a) out.centroid[a] = first[a] / out.total;
  // Unit vectors: <|n - c|^2> = 1 - 2 c.<n> + |c|^2 = 1 - |c|^2.
  const double c2 = out.centroid[0] * out.centroid[0] + out.centroid[1] * out.centroid[1] +
                    out.centroid[2] * out.centroid[2];
  out.second_moment = 1.0 - c2;
  return out;
}

HusimiProjector::HusimiProjector(const SpinRegister& reg, int n_theta, int n_phi)
    : reg_(reg), n_theta_(n_theta), n_phi_(n_phi) {
  require_symmetric(reg, "husimi_grid");
  if (n_theta < 2 || n_phi < 2) {
    throw std::invalid_argument("husimi_grid: need n_theta >= 2 and n_phi >= 2");
  }
  // One eigendecomposition of Jy serves every row of the grid.
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(collective_operator(reg, Axis::kY));
  const ComplexMatrix& v = eig.eigenvectors();
  const StateVector lowest = v.row(0).adjoint();
  columns_.reserve(static_cast<std::size_t>(n_theta));
  for (int it = 0; it < n_theta; ++it) {
    const double theta = (it + 0.5) * std::numbers::pi / n_theta;
    StateVector phases(v.cols());
    for (Index k = 0; k < v.cols(); ++k) phases(k) = std::polar(1.0, -theta * eig.eigenvalues()(k)) * lowest(k);
    columns_.push_back(v * phases);
  }
}

HusimiGrid HusimiProjector::evaluate(const SpinState& state) const {
  if (state.reg != reg_) throw DimensionError("husimi_grid: state register differs from grid register");
  HusimiGrid grid;
  grid.n_theta = n_theta_;
  grid.n_phi = n_phi_;
  grid.theta.resize(static_cast<std::size_t>(n_theta_));
  grid.phi.resize(static_cast<std::size_t>(n_phi_));
  grid.q.resize(static_cast<std::size_t>(n_theta_) * n_phi_);
  for (int it = 0; it < n_theta_; ++it) grid.theta[it] = (it + 0.5) * std::numbers::pi / n_theta_;
  for (int ip = 0; ip < n_phi_; ++ip) grid.phi[ip] = 2.0 * std::numbers::pi * ip / n_phi_;

  // gamma(theta, phi) = e^{-i phi j} e^{-i phi Jz} exp(-i theta Jy)|j,-j>, so
  // <gamma|psi> = sum_k e^{i phi k} conj(c_k) psi_k with k = m + j.
  const double prefactor = (2.0 * reg_.j() + 1.0) / (4.0 * std::numbers::pi);
  const Index dim = reg_.dim();
  StateVector weights(dim);
  for (int it = 0; it < n_theta_; ++it) {
    weights = columns_[static_cast<std::size_t>(it)].conjugate().cwiseProduct(state.vector);
    for (int ip = 0; ip < n_phi_; ++ip) {
      const Complex z = std::polar(1.0, grid.phi[ip]);
      Complex amplitude{};
      for (Index k = dim - 1; k >= 0; --k) amplitude = amplitude * z + weights(k);
      grid.q[static_cast<std::size_t>(it) * n_phi_ + ip] = prefactor * std::norm(amplitude);
    }
  }
  return grid;
}

HusimiGrid husimi_grid(const SpinState& state, int n_theta, int n_phi) {
  return HusimiProjector(state.reg, n_theta, n_phi).evaluate(state);
}

std::vector<double> measure_jz(const SpinState& state, std::uint64_t seed, std::size_t n_samples) {
  require_symmetric(state.reg, "measure_jz");
  if (state.vector.size() != state.reg.dim()) throw DimensionError("measure_jz: state size mismatch");
  if (std::abs(state.vector.squaredNorm() - 1.0) > 1e-8) {
    throw StateError("measure_jz: state is not normalized");
  }
  std::vector<double> probabilities(static_cast<std::size_t>(state.vector.size()));
  for (Index k = 0; k < state.vector.size(); ++k) {
    probabilities[static_cast<std::size_t>(k)] = std::norm(state.vector(k));
  }
  const std::vector<double> m_values = jz_eigenvalues(state.reg);
  UniformStream stream(seed);
  std::vector<double> samples(n_samples);
  for (auto& s : samples) s = m_values[inverse_cdf_index(probabilities, stream.next())];
  return samples;
}

SpinState embed_symmetric_into_full(const SpinState& state) {
  require_symmetric(state.reg, "embed_symmetric_into_full");
  constexpr int kMaxEmbedIons = 12;
  const int n = state.reg.n_ions();
  if (n > kMaxEmbedIons) {
    throw DimensionError("embed_symmetric_into_full: at most " + std::to_string(kMaxEmbedIons) + " ions");
  }
  const SpinRegister full = SpinRegister::full(n);
  StateVector out = StateVector::Zero(full.dim());
  for (Index code = 0; code < full.dim(); ++code) {
    const int weight = std::popcount(static_cast<std::uint64_t>(code));
    out(code) = state.vector(weight) / std::sqrt(binomial(n, weight));
  }
  return {full, std::move(out)};
}

}  // namespace ionsim
