#include "ionsim/protocols.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "ionsim/errors.hpp"
#include "ionsim/random.hpp"

namespace ionsim {

namespace {

constexpr int kMaxPulseBuiltIons = 5;

void require_full_pair(const SpinRegister& reg, int ion_a, int ion_b, const char* what) {
  if (!reg.is_full()) throw RepresentationError(std::string(what) + ": requires the Full representation");
  for (int ion : {ion_a, ion_b}) {
    if (ion < 0 || ion >= reg.n_ions()) {
      throw IndexError(std::string(what) + ": ion " + std::to_string(ion) + " out of range");
    }
  }
  if (ion_a == ion_b) throw std::invalid_argument(std::string(what) + ": the two ions must differ");
}

void require_pulse_size(const SpinRegister& reg, const char* what) {
  if (reg.n_ions() > kMaxPulseBuiltIons) {
    throw DimensionError(std::string(what) + ": joint-space construction limited to " +
                         std::to_string(kMaxPulseBuiltIons) + " ions");
  }
}

// Signed split of a loop area into (kappa_x, kappa_p) with kappa_x * kappa_p = area.
std::pair<double, double> split_area(double area) {
  const double k = std::sqrt(std::abs(area));
  return {area < 0.0 ? -k : k, k};
}

PulseBuiltUnitary build_from_pulses(const SpinRegister& reg, int cutoff, const PulseSequence& seq) {
  const FockMode mode(cutoff);
  const ComplexMatrix joint = compose(reg, mode, seq);
  const int levels = trusted_fock_levels(mode, sequence_excursion(reg, seq));
  const Factorization f = factor_vibration(joint, reg.dim(), mode.dim(), levels);
  return {f.spin_unitary, f.residual, f.trusted_levels, cutoff};
}

std::vector<int> system_ions(int n_ions, int readout_ion) {
  std::vector<int> ions;
  for (int i = 0; i < n_ions; ++i) {
    if (i != readout_ion) ions.push_back(i);
  }
  return ions;
}

double half_spin(std::size_t code, int ion) { return ((code >> ion) & 1U) ? 0.5 : -0.5; }

// Inserts `bit` at position `ion` of a code over the remaining ions.
Index insert_bit(Index code, int ion, int bit) {
  const Index low = code & ((Index{1} << ion) - 1);
  const Index high = code >> ion;
  return low | (Index{bit} << ion) | (high << (ion + 1));
}

}  // namespace

// ---------------------------------------------------------------- cat state

ComplexMatrix x_basis(const SpinRegister& reg) {
  return carrier_rotation(reg, Axis::kY, std::numbers::pi / 2.0);
}

CatStateReport cat_state_protocol(int n_ions, Construction construction, int cutoff) {
  const SpinRegister reg = SpinRegister::symmetric(n_ions);
  const double theta = std::numbers::pi / 2.0;
  const ComplexMatrix xb = x_basis(reg);
  const StateVector prepared = xb * dicke_state(reg, -reg.j()).vector;

  CatStateReport report{n_ions, Construction::kDirect, std::nullopt, SpinState{reg, StateVector{}}, {}, 0.0, 0.0, 0.0, 0.0, std::nullopt};
  std::optional<ComplexMatrix> twist;

  if (construction != Construction::kDirect) {
    const double k = std::sqrt(theta);
    const PulseSequence seq = loop_sequence(k, k, CollectiveJz{}, CollectiveJz{});
    bool fits = true;
    try {
      const FockMode mode(cutoff);
      for (const Pulse& p : seq) validate_pulse(reg, mode, p);
      fits = trusted_fock_levels(mode, sequence_excursion(reg, seq)) >= 1;
    } catch (const TruncationError&) {
      if (construction == Construction::kPulses) throw;
      fits = false;
    }
    if (fits || construction == Construction::kPulses) {
      const PulseBuiltUnitary built = build_from_pulses(reg, cutoff, seq);
      twist = built.unitary;
      report.factorization_residual = built.residual;
      report.construction = Construction::kPulses;
    }
  }
  if (!twist) {
    const ComplexMatrix jz = collective_operator(reg, Axis::kZ);
    twist = matrix_exponential(Complex{0.0, -theta} * jz * jz);
    report.construction = Construction::kDirect;
  }

  report.state.vector = *twist * prepared;
  const StateVector amplitudes = xb.adjoint() * report.state.vector;
  const Index last = amplitudes.size() - 1;
  for (Index k = 0; k < amplitudes.size(); ++k) {
    const double pop = std::norm(amplitudes(k));
    report.x_populations.push_back(pop);
    if (k != 0 && k != last) report.other_max = std::max(report.other_max, pop);
  }
  report.population_minus = report.x_populations.front();
  report.population_plus = report.x_populations.back();
  report.relative_phase = std::arg(amplitudes(last) / amplitudes(0));
  if (n_ions % 2 == 0) {
    const int j = n_ions / 2;
    report.expected_relative_phase = (j % 2 == 0 ? 1.0 : -1.0) * std::numbers::pi / 2.0;
  }
  return report;
}

// ---------------------------------------------------------------- kicked top

ComplexMatrix floquet_operator(const KickedTopParams& params) {
  if (params.two_j < 1) throw std::invalid_argument("floquet_operator: need j >= 1/2");
  const SpinRegister reg = SpinRegister::symmetric(params.two_j);
  const ComplexMatrix jz = collective_operator(reg, Axis::kZ);
  const ComplexMatrix twist =
      matrix_exponential(Complex{0.0, -params.kappa / (2.0 * params.j())} * jz * jz);
  return twist * carrier_rotation(reg, Axis::kY, params.p);
}

Trajectory evolve_kicked_top(const KickedTopParams& params, const SpinState& initial, int steps,
                             std::optional<HusimiOptions> husimi) {
  if (!initial.reg.is_symmetric() || initial.reg.n_ions() != params.two_j) {
    throw DimensionError("evolve_kicked_top: initial state is not a Symmetric state of j = " +
                         std::to_string(params.j()));
  }
  if (steps < 0) throw std::invalid_argument("evolve_kicked_top: negative step count");
  if (husimi && husimi->every < 1) throw std::invalid_argument("evolve_kicked_top: husimi interval < 1");

  const ComplexMatrix u = floquet_operator(params);
  const ComplexMatrix jx = collective_operator(initial.reg, Axis::kX);
  const ComplexMatrix jy = collective_operator(initial.reg, Axis::kY);
  const ComplexMatrix jz = collective_operator(initial.reg, Axis::kZ);
  std::optional<HusimiProjector> projector;
  if (husimi) projector.emplace(initial.reg, husimi->n_theta, husimi->n_phi);

  Trajectory out{{}, {}, initial};
  StateVector& psi = out.final_state.vector;
  const double j = params.j();
  for (int step = 0; step <= steps; ++step) {
    if (step > 0) psi = (u * psi).eval();
    TrajectoryRecord rec{step, expectation(jx, psi) / j, expectation(jy, psi) / j,
                         expectation(jz, psi) / j, psi.norm(), -1};
    if (projector && step % husimi->every == 0) {
      rec.husimi_index = static_cast<int>(out.husimi.size());
      out.husimi.push_back(projector->evaluate(out.final_state));
    }
    out.records.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------- readout

ComplexMatrix readout_coupling_reference(const SpinRegister& reg, int readout_ion, double mu) {
  if (!reg.is_full()) throw RepresentationError("readout coupling: requires the Full representation");
  if (reg.n_ions() < 2) throw std::invalid_argument("readout coupling: need at least two ions");
  if (readout_ion < 0 || readout_ion >= reg.n_ions()) throw IndexError("readout coupling: ion out of range");
  ComplexMatrix jy = ComplexMatrix::Zero(reg.dim(), reg.dim());
  for (int ion : system_ions(reg.n_ions(), readout_ion)) jy += single_ion_operator(reg, ion, Axis::kY);
  const ComplexMatrix sz = single_ion_operator(reg, readout_ion, Axis::kZ);
  return matrix_exponential(Complex{0.0, -mu} * jy * sz);
}

PulseBuiltUnitary readout_coupling(const SpinRegister& reg, int readout_ion, double mu, int cutoff) {
  if (!reg.is_full()) throw RepresentationError("readout coupling: requires the Full representation");
  if (reg.n_ions() < 2) throw std::invalid_argument("readout coupling: need at least two ions");
  if (readout_ion < 0 || readout_ion >= reg.n_ions()) throw IndexError("readout coupling: ion out of range");
  require_pulse_size(reg, "readout coupling");

  const std::vector<int> system = system_ions(reg.n_ions(), readout_ion);
  const auto [kx, kp] = split_area(mu);
  // exp(+i pi/2 Jx) carries Jz to Jy; it brackets the Jz-Jz loop.
  PulseSequence seq;
  seq.push_back(CarrierPulse{Axis::kX, std::numbers::pi / 2.0, system});
  for (Pulse& p : loop_sequence(kx, kp, SingleIon{readout_ion}, IonSetJz{system})) seq.push_back(std::move(p));
  seq.push_back(CarrierPulse{Axis::kX, -std::numbers::pi / 2.0, system});
  return build_from_pulses(reg, cutoff, seq);
}

void apply_readout_coupling(StateVector& state, int n_ions, int readout_ion, double mu) {
  if (readout_ion < 0 || readout_ion >= n_ions) throw IndexError("readout coupling: ion out of range");
  if (state.size() != (Index{1} << n_ions)) throw DimensionError("readout coupling: state size != 2^N");
  const std::vector<int> system = system_ions(n_ions, readout_ion);
  const Eigen::Matrix2cd undo = single_ion_rotation(Axis::kX, std::numbers::pi / 2.0);
  const Eigen::Matrix2cd redo = single_ion_rotation(Axis::kX, -std::numbers::pi / 2.0);
  for (int ion : system) apply_single_ion_unitary(state, n_ions, ion, undo);
  for (Index code = 0; code < state.size(); ++code) {
    const auto c = static_cast<std::size_t>(code);
    double m = 0.0;
    for (int ion : system) m += half_spin(c, ion);
    state(code) *= std::polar(1.0, -mu * half_spin(c, readout_ion) * m);
  }
  for (int ion : system) apply_single_ion_unitary(state, n_ions, ion, redo);
}

void apply_floquet_full(StateVector& state, const KickedTopParams& params) {
  const int n = params.two_j;
  if (state.size() != (Index{1} << n)) throw DimensionError("apply_floquet_full: state size != 2^(2j)");
  const Eigen::Matrix2cd kick = single_ion_rotation(Axis::kY, params.p);
  for (int ion = 0; ion < n; ++ion) apply_single_ion_unitary(state, n, ion, kick);
  const double rate = params.kappa / (2.0 * params.j());
  for (Index code = 0; code < state.size(); ++code) {
    const double m = std::popcount(static_cast<std::uint64_t>(code)) - params.j();
    state(code) *= std::polar(1.0, -rate * m * m);
  }
}

MeasurementRecord measurement_record(const RecordConfig& config) {
  const int n_system = config.params.two_j;
  const int n_ions = n_system + 1;
  if (n_system < 1 || n_ions > kMaxRecordIons) {
    throw DimensionError("measurement_record: total ion count must lie in [2, " +
                         std::to_string(kMaxRecordIons) + "]");
  }
  if (config.readout_ion < 0 || config.readout_ion >= n_ions) {
    throw IndexError("measurement_record: readout ion out of range");
  }
  if (config.steps < 0) throw std::invalid_argument("measurement_record: negative step count");

  StateVector system =
      embed_symmetric_into_full(spin_coherent_state(SpinRegister::symmetric(n_system), config.theta0, config.phi0))
          .vector;
  const StateVector prep =
      spin_coherent_state(SpinRegister::symmetric(1), config.prep.theta, config.prep.phi).vector;

  MeasurementRecord record{config, {}, {}};
  record.bits.reserve(static_cast<std::size_t>(config.steps));
  record.p_one.reserve(static_cast<std::size_t>(config.steps));
  UniformStream stream(config.seed);
  StateVector joint(Index{1} << n_ions);
  const int r = config.readout_ion;

  for (int step = 0; step < config.steps; ++step) {
    apply_floquet_full(system, config.params);
    for (Index c = 0; c < system.size(); ++c) {
      joint(insert_bit(c, r, 0)) = system(c) * prep(0);
      joint(insert_bit(c, r, 1)) = system(c) * prep(1);
    }
    apply_readout_coupling(joint, n_ions, r, config.mu);

    double p[2] = {0.0, 0.0};
    for (Index c = 0; c < system.size(); ++c) {
      p[0] += std::norm(joint(insert_bit(c, r, 0)));
      p[1] += std::norm(joint(insert_bit(c, r, 1)));
    }
    const double total = p[0] + p[1];
    p[0] /= total;
    p[1] /= total;
    const int bit = static_cast<int>(inverse_cdf_index(p, stream.next()));
    const double scale = 1.0 / std::sqrt(p[bit] * total);
    for (Index c = 0; c < system.size(); ++c) system(c) = joint(insert_bit(c, r, bit)) * scale;

    record.bits.push_back(bit);
    record.p_one.push_back(p[1]);
  }
  return record;
}

// ---------------------------------------------------------------- gates

ComplexMatrix ising_reference(const SpinRegister& reg, int ion_a, int ion_b, double chi) {
  require_full_pair(reg, ion_a, ion_b, "ising_reference");
  const ComplexMatrix za = single_ion_operator(reg, ion_a, Axis::kZ);
  const ComplexMatrix zb = single_ion_operator(reg, ion_b, Axis::kZ);
  return matrix_exponential(Complex{0.0, -chi} * za * zb);
}

PulseBuiltUnitary ising_gate(const SpinRegister& reg, int ion_a, int ion_b, double chi, int cutoff,
                             LoopClosure closure) {
  require_full_pair(reg, ion_a, ion_b, "ising_gate");
  require_pulse_size(reg, "ising_gate");
  const auto [kx, kp] = split_area(chi);
  return build_from_pulses(reg, cutoff, loop_sequence(kx, kp, SingleIon{ion_a}, SingleIon{ion_b}, closure));
}

ComplexMatrix controlled_phase_reference(const SpinRegister& reg, int ion_a, int ion_b) {
  require_full_pair(reg, ion_a, ion_b, "controlled_phase_reference");
  ComplexMatrix out = ComplexMatrix::Identity(reg.dim(), reg.dim());
  for (Index code = 0; code < reg.dim(); ++code) {
    if (((code >> ion_a) & 1) && ((code >> ion_b) & 1)) out(code, code) = -1.0;
  }
  return out;
}

PulseBuiltUnitary controlled_phase(const SpinRegister& reg, int ion_a, int ion_b, int cutoff,
                                   LoopClosure closure) {
  PulseBuiltUnitary out = ising_gate(reg, ion_a, ion_b, std::numbers::pi, cutoff, closure);
  const double half_pi = std::numbers::pi / 2.0;
  out.unitary = carrier_rotation(reg, Axis::kZ, half_pi, {ion_a}) *
                carrier_rotation(reg, Axis::kZ, half_pi, {ion_b}) * out.unitary;
  return out;
}

}  // namespace ionsim
