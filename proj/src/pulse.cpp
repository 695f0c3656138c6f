#include "ionsim/pulse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

std::vector<bool> ion_mask(const SpinRegister& reg, const std::vector<int>& ions, const char* what) {
  if (ions.empty()) throw std::invalid_argument(std::string(what) + ": empty ion set");
  std::vector<bool> mask(static_cast<std::size_t>(reg.n_ions()), false);
  for (int ion : ions) {
    if (ion < 0 || ion >= reg.n_ions()) {
      throw IndexError(std::string(what) + ": ion " + std::to_string(ion) + " out of range");
    }
    if (mask[static_cast<std::size_t>(ion)]) {
      throw std::invalid_argument(std::string(what) + ": ion " + std::to_string(ion) + " repeated");
    }
    mask[static_cast<std::size_t>(ion)] = true;
  }
  return mask;
}

double max_abs(const std::vector<double>& values) {
  double out = 0.0;
  for (double v : values) out = std::max(out, std::abs(v));
  return out;
}

// Left-multiplies a block of joint-space columns by one pulse.
class PulseApplier {
 public:
  PulseApplier(const SpinRegister& reg, const FockMode& mode, const Pulse& pulse)
      : spin_dim_(reg.dim()), boson_dim_(mode.dim()) {
    validate_pulse(reg, mode, pulse);
    if (const auto* cd = std::get_if<ConditionalDisplacement>(&pulse)) {
      weights_ = weight_eigenvalues(reg, cd->weight);
      for (double w : weights_) {
        if (w != 0.0 && cd->beta != Complex{} && !blocks_.contains(w)) {
          blocks_.emplace(w, displacement(mode, cd->beta * w));
        }
      }
    } else {
      const auto& carrier = std::get<CarrierPulse>(pulse);
      spin_ = carrier.targets ? carrier_rotation(reg, carrier.axis, carrier.angle, *carrier.targets)
                              : carrier_rotation(reg, carrier.axis, carrier.angle);
    }
  }

  void apply(ComplexMatrix& joint) const {
    if (spin_) {
      apply_carrier(joint);
      return;
    }
    for (Index s = 0; s < spin_dim_; ++s) {
      const auto it = blocks_.find(weights_[static_cast<std::size_t>(s)]);
      if (it == blocks_.end()) continue;  // identity block
      auto rows = joint.middleRows(s * boson_dim_, boson_dim_);
      rows = (it->second * rows).eval();
    }
  }

 private:
  void apply_carrier(ComplexMatrix& joint) const {
    ComplexMatrix gathered(spin_dim_, joint.cols());
    for (Index n = 0; n < boson_dim_; ++n) {
      for (Index s = 0; s < spin_dim_; ++s) gathered.row(s) = joint.row(s * boson_dim_ + n);
      gathered = (*spin_ * gathered).eval();
      for (Index s = 0; s < spin_dim_; ++s) joint.row(s * boson_dim_ + n) = gathered.row(s);
    }
  }

  Index spin_dim_;
  Index boson_dim_;
  std::vector<double> weights_;
  std::map<double, ComplexMatrix> blocks_;
  std::optional<ComplexMatrix> spin_;
};

// exp(r (a^dagger - a)) without the excursion guard; used only to probe how
// far a displacement reaches into the truncation edge.
ComplexMatrix unguarded_displacement(const FockMode& mode, double r) {
  const ComplexMatrix a = annihilation(mode);
  return matrix_exponential(r * (a.adjoint() - a));
}

}  // namespace

std::vector<double> weight_eigenvalues(const SpinRegister& reg, const SpinWeight& weight) {
  if (std::holds_alternative<CollectiveJz>(weight)) return jz_eigenvalues(reg);

  if (!reg.is_full()) {
    throw RepresentationError("spin weight: single-ion and ion-set weights need the Full representation");
  }
  std::vector<bool> mask;
  if (const auto* single = std::get_if<SingleIon>(&weight)) {
    mask = ion_mask(reg, {single->ion}, "SingleIon weight");
  } else {
    mask = ion_mask(reg, std::get<IonSetJz>(weight).ions, "IonSetJz weight");
  }
  std::vector<double> values(static_cast<std::size_t>(reg.dim()), 0.0);
  for (std::size_t code = 0; code < values.size(); ++code) {
    for (int ion = 0; ion < reg.n_ions(); ++ion) {
      if (mask[static_cast<std::size_t>(ion)]) values[code] += ((code >> ion) & 1U) ? 0.5 : -0.5;
    }
  }
  return values;
}

void validate_pulse(const SpinRegister& reg, const FockMode& mode, const Pulse& pulse) {
  if (const auto* cd = std::get_if<ConditionalDisplacement>(&pulse)) {
    if (!std::isfinite(cd->beta.real()) || !std::isfinite(cd->beta.imag())) {
      throw NumericError("conditional displacement: non-finite beta");
    }
    const double reach = std::abs(cd->beta) * max_abs(weight_eigenvalues(reg, cd->weight));
    if (reach > mode.excursion_limit() * (1.0 + 1e-12)) {
      throw TruncationError("conditional displacement: |beta| * max|w| = " + std::to_string(reach) +
                            " exceeds sqrt(cutoff)/2 = " + std::to_string(mode.excursion_limit()));
    }
    return;
  }
  const auto& carrier = std::get<CarrierPulse>(pulse);
  if (!std::isfinite(carrier.angle)) throw NumericError("carrier pulse: non-finite angle");
  if (carrier.targets) {
    const std::vector<bool> mask = ion_mask(reg, *carrier.targets, "carrier pulse");
    if (reg.is_symmetric() && !std::ranges::all_of(mask, [](bool b) { return b; })) {
      throw RepresentationError("carrier pulse: ion subsets need the Full representation");
    }
  }
}

ComplexMatrix conditional_displacement_unitary(const SpinRegister& reg, const FockMode& mode,
                                               Complex beta, const SpinWeight& weight) {
  const Index joint = reg.dim() * mode.dim();
  ComplexMatrix u = ComplexMatrix::Identity(joint, joint);
  PulseApplier(reg, mode, ConditionalDisplacement{beta, weight}).apply(u);
  return u;
}

ComplexMatrix compose(const SpinRegister& reg, const FockMode& mode, const PulseSequence& seq) {
  if (seq.empty()) throw std::invalid_argument("compose: empty pulse sequence");
  const Index joint = reg.dim() * mode.dim();
  if (joint > kMaxTensorDimension) {
    throw DimensionError("compose: joint dimension " + std::to_string(joint) + " exceeds guard");
  }
  ComplexMatrix u = ComplexMatrix::Identity(joint, joint);
  for (const Pulse& pulse : seq) PulseApplier(reg, mode, pulse).apply(u);
  return u;
}

StateVector evolve(const SpinRegister& reg, const FockMode& mode, const PulseSequence& seq,
                   StateVector joint_state) {
  if (joint_state.size() != reg.dim() * mode.dim()) {
    throw DimensionError("evolve: state size does not match spin_dim * boson_dim");
  }
  ComplexMatrix column = joint_state;
  for (const Pulse& pulse : seq) PulseApplier(reg, mode, pulse).apply(column);
  return column.col(0);
}

PulseSequence loop_sequence(double kappa_x, double kappa_p, const SpinWeight& weight_a,
                            const SpinWeight& weight_b, LoopClosure closure) {
  const double s = 1.0 / std::sqrt(2.0);
  auto x_kick = [s](double k, const SpinWeight& w) -> Pulse {
    return ConditionalDisplacement{Complex{0.0, k * s}, w};
  };
  auto p_kick = [s](double k, const SpinWeight& w) -> Pulse {
    return ConditionalDisplacement{Complex{-k * s, 0.0}, w};
  };
  switch (closure) {
    case LoopClosure::kCommutator:
      return {p_kick(-kappa_p, weight_b), x_kick(-kappa_x, weight_a), p_kick(kappa_p, weight_b),
              x_kick(kappa_x, weight_a)};
    case LoopClosure::kRepeatedMomentum:
      return {p_kick(kappa_p, weight_b), x_kick(-kappa_x, weight_a), p_kick(kappa_p, weight_b),
              x_kick(kappa_x, weight_a)};
    case LoopClosure::kPositionClosing:
      return {x_kick(kappa_p, weight_b), x_kick(-kappa_x, weight_a), p_kick(kappa_p, weight_b),
              x_kick(kappa_x, weight_a)};
  }
  throw std::invalid_argument("loop_sequence: unknown closure");
}

double sequence_excursion(const SpinRegister& reg, const PulseSequence& seq) {
  // Between carriers each spin basis state follows its own phase-space path;
  // a carrier can hand any branch to any other, so segment maxima add.
  std::vector<Complex> position(static_cast<std::size_t>(reg.dim()));
  double segment_max = 0.0;
  double total = 0.0;
  for (const Pulse& pulse : seq) {
    if (const auto* cd = std::get_if<ConditionalDisplacement>(&pulse)) {
      const std::vector<double> w = weight_eigenvalues(reg, cd->weight);
      for (std::size_t s = 0; s < position.size(); ++s) {
        position[s] += cd->beta * w[s];
        segment_max = std::max(segment_max, std::abs(position[s]));
      }
    } else {
      total += segment_max;
      segment_max = 0.0;
      std::ranges::fill(position, Complex{});
    }
  }
  return total + segment_max;
}

int trusted_fock_levels(const FockMode& mode, double excursion, double amplitude_tolerance) {
  const Index top = mode.dim();
  const int max_levels = static_cast<int>(top) - 2;
  if (excursion == 0.0) return max_levels;
  const ComplexMatrix d = unguarded_displacement(mode, excursion);
  int levels = 0;
  for (Index n = 0; n < top - 2; ++n) {
    const double reach = std::sqrt(std::norm(d(top - 1, n)) + std::norm(d(top - 2, n)));
    if (reach > amplitude_tolerance) break;
    ++levels;
  }
  return levels;
}

Factorization factor_vibration(const ComplexMatrix& joint, Index spin_dim, Index boson_dim,
                               std::optional<int> trusted_levels) {
  if (spin_dim < 1 || boson_dim < 1 || joint.rows() != spin_dim * boson_dim ||
      joint.cols() != joint.rows()) {
    throw DimensionError("factor_vibration: joint matrix is not (spin_dim*boson_dim) square");
  }
  const int levels = trusted_levels.value_or(static_cast<int>(boson_dim) - 2);
  if (levels < 1 || levels > boson_dim) {
    throw std::invalid_argument("factor_vibration: no trusted Fock levels (" + std::to_string(levels) +
                                "); raise the cutoff");
  }

  auto block = [&](Index n, Index n2) {
    ComplexMatrix b(spin_dim, spin_dim);
    for (Index s = 0; s < spin_dim; ++s) {
      for (Index s2 = 0; s2 < spin_dim; ++s2) b(s, s2) = joint(s * boson_dim + n, s2 * boson_dim + n2);
    }
    return b;
  };

  Factorization out;
  out.trusted_levels = levels;
  out.spin_unitary = block(0, 0);
  // A trusted input level gives an accurate column, so every output level of it is checked.
  for (Index n = 0; n < boson_dim; ++n) {
    for (Index n2 = 0; n2 < levels; ++n2) {
      const ComplexMatrix b = block(n, n2);
      const double r = n == n2 ? distance_up_to_global_phase(b, out.spin_unitary) : max_entry_norm(b);
      out.residual = std::max(out.residual, r);
    }
  }
  return out;
}

NonlinearTopReport verify_nonlinear_top(int n_ions, double kappa_x, double kappa_p, int cutoff,
                                        LoopClosure closure) {
  const SpinRegister reg = SpinRegister::symmetric(n_ions);
  const FockMode mode(cutoff);
  const PulseSequence seq = loop_sequence(kappa_x, kappa_p, CollectiveJz{}, CollectiveJz{}, closure);
  const ComplexMatrix joint = compose(reg, mode, seq);
  const int levels = trusted_fock_levels(mode, sequence_excursion(reg, seq));
  const Factorization f = factor_vibration(joint, reg.dim(), mode.dim(), levels);

  NonlinearTopReport report;
  report.n_ions = n_ions;
  report.kappa_x = kappa_x;
  report.kappa_p = kappa_p;
  report.cutoff = cutoff;
  report.closure = closure;
  report.theta = kappa_x * kappa_p;
  report.residual = f.residual;
  report.trusted_levels = f.trusted_levels;
  report.spin_unitary = f.spin_unitary;
  report.m_values = jz_eigenvalues(reg);

  const ComplexMatrix& u = f.spin_unitary;
  Complex alignment{};
  for (Index k = 0; k < u.rows(); ++k) {
    const double m = report.m_values[static_cast<std::size_t>(k)];
    alignment += u(k, k) * std::polar(1.0, report.theta * m * m);
  }
  report.global_phase = std::arg(alignment);
  for (Index k = 0; k < u.rows(); ++k) {
    const double m = report.m_values[static_cast<std::size_t>(k)];
    const double err = std::remainder(std::arg(u(k, k)) + report.theta * m * m - report.global_phase,
                                      2.0 * std::numbers::pi);
    report.phase_errors.push_back(std::abs(err));
    report.max_phase_error = std::max(report.max_phase_error, std::abs(err));
    for (Index k2 = 0; k2 < u.cols(); ++k2) {
      if (k2 != k) report.off_diagonal_max = std::max(report.off_diagonal_max, std::abs(u(k, k2)));
    }
  }

  if (n_ions >= 2) {
    const Index hi = u.rows() - 1;
    const Index lo = n_ions / 2;  // smallest |m|
    const double m_hi = report.m_values[static_cast<std::size_t>(hi)];
    const double m_lo = report.m_values[static_cast<std::size_t>(lo)];
    const double dphase = std::remainder(std::arg(u(hi, hi)) - std::arg(u(lo, lo)), 2.0 * std::numbers::pi);
    report.extracted_theta = -dphase / (m_hi * m_hi - m_lo * m_lo);
  }
  return report;
}

}  // namespace ionsim
