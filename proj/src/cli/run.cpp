#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ionsim/classical.hpp"
#include "ionsim/cli.hpp"
#include "ionsim/errors.hpp"
#include "ionsim/protocols.hpp"
#include "ionsim/pulse.hpp"

namespace ionsim::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kLiteralResidualFloor = 0.1;

Json num(double value) {
  if (!std::isfinite(value)) return nullptr;
  return round_significant(value);
}

Json num(const std::optional<double>& value) { return value ? num(*value) : Json(nullptr); }

Json num_array(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(num(v));
  return out;
}

Json report(const std::string& command, Json config) {
  Json out;
  out["schema"] = 1;
  out["command"] = command;
  out["config"] = std::move(config);
  return out;
}

void emit(std::ostream& out, const Json& json) { out << json.dump(2) << '\n'; }

int two_j_from(double j) {
  const double twice = 2.0 * j;
  const long rounded = std::lround(twice);
  if (std::abs(twice - static_cast<double>(rounded)) > 1e-12 || rounded < 1) {
    throw std::invalid_argument("j must be a positive multiple of 1/2, got " + format_number(j));
  }
  if (rounded > SpinRegister::kMaxSymmetricIons) {
    throw DimensionError("j = " + format_number(j) + " exceeds the dimension guard");
  }
  return static_cast<int>(rounded);
}

std::string closure_name(LoopClosure closure) {
  switch (closure) {
    case LoopClosure::kCommutator:
      return "commutator";
    case LoopClosure::kRepeatedMomentum:
      return "repeated-momentum";
    case LoopClosure::kPositionClosing:
      return "position-closing";
  }
  return "?";
}

std::string basis_label(Index code, int n_ions) {
  std::string label;
  for (int ion = n_ions - 1; ion >= 0; --ion) label += ((code >> ion) & 1) ? 'e' : 'g';
  return label;
}

std::array<double, 2> labels_toward(double theta, double phi) {
  return coherent_label_toward(SpherePoint::from_polar(theta, phi).as_array());
}

// ---------------------------------------------------------------- verify-top

struct VerifyTopOptions {
  int n = 2;
  double kx = 0.3;
  double kp = 0.3;
  int cutoff = FockMode::kDefaultCutoff;
  double tol = 1e-8;
  bool literal_order = false;
};

Json top_report_fields(const NonlinearTopReport& r) {
  Json out;
  out["closure"] = closure_name(r.closure);
  out["theta"] = num(r.theta);
  out["extracted_theta"] = num(r.extracted_theta);
  out["residual"] = num(r.residual);
  out["trusted_levels"] = r.trusted_levels;
  out["global_phase"] = num(r.global_phase);
  out["max_phase_error"] = num(r.max_phase_error);
  out["off_diagonal_max"] = num(r.off_diagonal_max);
  return out;
}

int run_verify_top(const VerifyTopOptions& o, std::ostream& out) {
  const LoopClosure closure = o.literal_order ? LoopClosure::kRepeatedMomentum : LoopClosure::kCommutator;
  Json config{{"n", o.n}, {"kx", num(o.kx)}, {"kp", num(o.kp)}, {"cutoff", o.cutoff},
              {"tol", num(o.tol)}, {"literal_order", o.literal_order}};
  const NonlinearTopReport r = verify_nonlinear_top(o.n, o.kx, o.kp, o.cutoff, closure);
  Json rep = report("verify-top", std::move(config));
  rep.update(top_report_fields(r));
  Json table = Json::array();
  for (std::size_t i = 0; i < r.m_values.size(); ++i) {
    table.push_back({{"m", num(r.m_values[i])}, {"phase_error", num(r.phase_errors[i])}});
  }
  rep["table"] = std::move(table);
  rep["pass"] = r.passes(o.tol);
  emit(out, rep);
  return r.passes(o.tol) ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------- typo-demo

int run_typo_demo(const VerifyTopOptions& o, std::ostream& out) {
  Json config{{"n", o.n}, {"kx", num(o.kx)}, {"kp", num(o.kp)}, {"cutoff", o.cutoff}, {"tol", num(o.tol)}};
  Json rows = Json::array();
  bool corrected_ok = false;
  bool literal_breaks = false;
  for (LoopClosure c : {LoopClosure::kCommutator, LoopClosure::kRepeatedMomentum, LoopClosure::kPositionClosing}) {
    const NonlinearTopReport r = verify_nonlinear_top(o.n, o.kx, o.kp, o.cutoff, c);
    rows.push_back(top_report_fields(r));
    if (c == LoopClosure::kCommutator) corrected_ok = r.passes(o.tol);
    if (c == LoopClosure::kRepeatedMomentum) literal_breaks = r.residual > kLiteralResidualFloor;
  }
  Json rep = report("typo-demo", std::move(config));
  rep["rows"] = std::move(rows);
  rep["corrected_factorizes"] = corrected_ok;
  rep["literal_residual_above"] = num(kLiteralResidualFloor);
  rep["literal_fails_to_factorize"] = literal_breaks;
  emit(out, rep);
  return corrected_ok && literal_breaks ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------- cat

struct CatOptions {
  int n = 2;
  std::string construction = "auto";
  int cutoff = FockMode::kDefaultCutoff;
  double tol = 1e-8;
};

int run_cat(const CatOptions& o, std::ostream& out) {
  Construction c = Construction::kAuto;
  if (o.construction == "pulses") c = Construction::kPulses;
  if (o.construction == "direct") c = Construction::kDirect;
  Json config{{"n", o.n}, {"construction", o.construction}, {"cutoff", o.cutoff}, {"tol", num(o.tol)}};
  const CatStateReport r = cat_state_protocol(o.n, c, o.cutoff);

  Json rep = report("cat", std::move(config));
  rep["route"] = r.construction == Construction::kPulses ? "pulses" : "direct";
  rep["factorization_residual"] = num(r.factorization_residual);
  rep["population_minus"] = num(r.population_minus);
  rep["population_plus"] = num(r.population_plus);
  rep["other_max"] = num(r.other_max);
  rep["x_populations"] = num_array(r.x_populations);
  rep["relative_phase"] = num(r.relative_phase);
  rep["expected_relative_phase"] = num(r.expected_relative_phase);
  rep["phase_convention"] = "|j,m>_x = exp(-i (pi/2) Jy) |j,m>_z";
  int code = kExitOk;
  if (o.n % 2 == 0) {
    const bool pass = std::abs(r.population_minus - 0.5) < o.tol && std::abs(r.population_plus - 0.5) < o.tol &&
                      r.other_max < o.tol;
    rep["pass"] = pass;
    if (!pass) code = kExitTolerance;
  } else {
    rep["pass"] = nullptr;
    rep["note"] = "odd N: diagnostic only";
  }
  emit(out, rep);
  return code;
}

// ---------------------------------------------------------------- kicked-top

struct KickedTopOptions {
  double j = 10.0;
  double kappa = 3.0;
  double p = kHalfPi;
  int steps = 100;
  double theta = 0.0;
  double phi = 0.0;
  int husimi_every = 0;
  int n_theta = 64;
  int n_phi = 128;
  std::string out;
};

int run_kicked_top(const KickedTopOptions& o, std::ostream& out) {
  const int two_j = two_j_from(o.j);
  if (o.steps < 0) throw std::invalid_argument("--steps must be non-negative");
  if (o.husimi_every < 0) throw std::invalid_argument("--husimi-every must be non-negative");
  Json config{{"j", num(o.j)},         {"kappa", num(o.kappa)}, {"p", num(o.p)},
              {"steps", o.steps},      {"theta", num(o.theta)}, {"phi", num(o.phi)},
              {"husimi_every", o.husimi_every}, {"n_theta", o.n_theta}, {"n_phi", o.n_phi}};
  const std::string config_text = config.dump();

  const KickedTopParams params{two_j, o.kappa, o.p};
  const SpinRegister reg = SpinRegister::symmetric(two_j);
  const auto label = labels_toward(o.theta, o.phi);
  std::optional<HusimiOptions> husimi;
  if (o.husimi_every > 0) husimi = HusimiOptions{o.husimi_every, o.n_theta, o.n_phi};
  const fs::path dir = resolve_output(o.out, "kicked_top");

  const Trajectory traj = evolve_kicked_top(params, spin_coherent_state(reg, label[0], label[1]), o.steps, husimi);

  std::vector<std::vector<double>> rows;
  double drift = 0.0;
  for (const TrajectoryRecord& r : traj.records) {
    rows.push_back({static_cast<double>(r.step), r.jx, r.jy, r.jz, r.norm});
    drift = std::max(drift, std::abs(r.norm - 1.0));
  }
  Json files = Json::array();
  const fs::path traj_path = dir / "trajectory.csv";
  write_csv(traj_path, config_text, {"step", "jx", "jy", "jz", "norm"}, rows);
  files.push_back(traj_path.string());

  Json snapshots = Json::array();
  for (const TrajectoryRecord& r : traj.records) {
    if (r.husimi_index < 0) continue;
    const HusimiGrid& grid = traj.husimi[static_cast<std::size_t>(r.husimi_index)];
    std::vector<std::vector<double>> qrows;
    for (int it = 0; it < grid.n_theta; ++it) {
      for (int ip = 0; ip < grid.n_phi; ++ip) qrows.push_back({grid.theta[it], grid.phi[ip], grid.at(it, ip)});
    }
    char name[32];
    std::snprintf(name, sizeof name, "husimi_%05d.csv", r.step);
    write_csv(dir / name, config_text, {"theta", "phi", "q"}, qrows);
    files.push_back((dir / name).string());
    const HusimiMoments m = grid.moments();
    snapshots.push_back({{"step", r.step}, {"total", num(m.total)}, {"second_moment", num(m.second_moment)}});
  }

  Json rep = report("kicked-top", std::move(config));
  const TrajectoryRecord& last = traj.records.back();
  rep["final"] = {{"jx", num(last.jx)}, {"jy", num(last.jy)}, {"jz", num(last.jz)}};
  rep["max_norm_drift"] = num(drift);
  rep["husimi"] = std::move(snapshots);
  rep["files"] = std::move(files);
  emit(out, rep);
  return kExitOk;
}

// ---------------------------------------------------------------- classical

struct ClassicalOptions {
  bool traj = false;
  bool lyapunov = false;
  bool lyap_map = false;
  double kappa = 3.0;
  double p = kHalfPi;
  int steps = 100;
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
  std::optional<double> theta;
  std::optional<double> phi;
  std::string order = "kick-twist";
  int n_theta = 32;
  int n_phi = 64;
  std::string out;
};

int run_classical(const ClassicalOptions& o, std::ostream& out) {
  if (static_cast<int>(o.traj) + static_cast<int>(o.lyapunov) + static_cast<int>(o.lyap_map) != 1) {
    throw std::invalid_argument("choose exactly one of --traj, --lyapunov, --lyap-map");
  }
  if (o.steps < 0) throw std::invalid_argument("--steps must be non-negative");
  const ClassicalParams params{o.kappa, o.p,
                               o.order == "twist-kick" ? MapOrder::kTwistThenKick : MapOrder::kKickThenTwist};
  SpherePoint start{o.x, o.y, o.z};
  if (o.theta || o.phi) start = SpherePoint::from_polar(o.theta.value_or(0.0), o.phi.value_or(0.0));
  start = start.normalized();

  const std::string mode = o.traj ? "traj" : (o.lyapunov ? "lyapunov" : "lyap-map");
  Json config{{"mode", mode}, {"kappa", num(o.kappa)}, {"p", num(o.p)}, {"steps", o.steps}, {"order", o.order}};
  if (o.lyap_map) {
    config["n_theta"] = o.n_theta;
    config["n_phi"] = o.n_phi;
  } else {
    config["start"] = {num(start.x), num(start.y), num(start.z)};
  }
  Json rep = report("classical", config);

  if (o.traj) {
    const auto points = classical_trajectory(start, params, o.steps);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
      rows.push_back({static_cast<double>(i), points[i].x, points[i].y, points[i].z});
    }
    const fs::path path = resolve_output(o.out, "classical_trajectory.csv");
    write_csv(path, config.dump(), {"step", "x", "y", "z"}, rows);
    const SpherePoint& end = points.back();
    rep["final"] = {num(end.x), num(end.y), num(end.z)};
    rep["return_distance"] = num(std::sqrt((end.x - start.x) * (end.x - start.x) + (end.y - start.y) * (end.y - start.y) +
                                           (end.z - start.z) * (end.z - start.z)));
    rep["files"] = {path.string()};
  } else if (o.lyapunov) {
    rep["lambda"] = num(lyapunov_estimate(start, params, o.steps));
  } else {
    const auto cells = lyapunov_map(params, o.n_theta, o.n_phi, o.steps);
    std::vector<std::vector<double>> rows;
    for (const LyapunovCell& c : cells) rows.push_back({c.theta, c.phi, c.lambda});
    const fs::path path = resolve_output(o.out, "lyapunov_map.csv");
    write_csv(path, config.dump(), {"theta", "phi", "lambda"}, rows);
    rep["files"] = {path.string()};
  }
  emit(out, rep);
  return kExitOk;
}

// ---------------------------------------------------------------- gate

struct GateOptions {
  std::string type = "cphase";
  int n = 2;
  int a = 0;
  int b = 1;
  double chi = std::numbers::pi;
  int cutoff = FockMode::kDefaultCutoff;
  double tol = 1e-8;
  bool literal_order = false;
};

int run_gate(const GateOptions& o, std::ostream& out) {
  const LoopClosure closure = o.literal_order ? LoopClosure::kPositionClosing : LoopClosure::kCommutator;
  const SpinRegister reg = SpinRegister::full(o.n);
  Json config{{"type", o.type}, {"n", o.n}, {"a", o.a}, {"b", o.b}, {"cutoff", o.cutoff},
              {"tol", num(o.tol)}, {"literal_order", o.literal_order}};
  if (o.type == "ising") config["chi"] = num(o.chi);

  const bool cphase = o.type == "cphase";
  const PulseBuiltUnitary built = cphase ? controlled_phase(reg, o.a, o.b, o.cutoff, closure)
                                         : ising_gate(reg, o.a, o.b, o.chi, o.cutoff, closure);
  const ComplexMatrix reference =
      cphase ? controlled_phase_reference(reg, o.a, o.b) : ising_reference(reg, o.a, o.b, o.chi);
  const double distance = distance_up_to_global_phase(built.unitary, reference);
  const Complex overlap = (reference.adjoint() * built.unitary).trace();
  const double global_phase = std::arg(overlap);
  const Complex unphase = std::polar(1.0, -global_phase);

  Json table = Json::array();
  double off_diagonal = 0.0;
  for (Index r = 0; r < reg.dim(); ++r) {
    for (Index c = 0; c < reg.dim(); ++c) {
      if (r != c) off_diagonal = std::max(off_diagonal, std::abs(built.unitary(r, c)));
    }
    const Complex d = unphase * built.unitary(r, r);
    const Complex ref = reference(r, r);
    table.push_back({{"basis", basis_label(r, o.n)},
                     {"entry", {num(d.real()), num(d.imag())}},
                     {"reference", {num(ref.real()), num(ref.imag())}}});
  }
  const bool pass = distance < o.tol && built.residual < o.tol;
  Json rep = report("gate", std::move(config));
  rep["closure"] = closure_name(closure);
  rep["global_phase"] = num(global_phase);
  rep["distance"] = num(distance);
  rep["residual"] = num(built.residual);
  rep["trusted_levels"] = built.trusted_levels;
  rep["off_diagonal_max"] = num(off_diagonal);
  rep["truth_table"] = std::move(table);
  rep["pass"] = pass;
  emit(out, rep);
  return pass ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------- record

struct RecordOptions {
  double j = 1.5;
  double kappa = 3.0;
  double p = kHalfPi;
  std::optional<int> readout_ion;
  double mu = 0.5;
  double theta_r = kHalfPi;
  double phi_r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  int steps = 50;
  std::uint64_t seed = 1;
  std::string out;
};

int run_record(const RecordOptions& o, std::ostream& out) {
  const int two_j = two_j_from(o.j);
  if (two_j + 1 > kMaxRecordIons) {
    throw DimensionError("record: 2j + 1 ions exceeds the guard of " + std::to_string(kMaxRecordIons));
  }
  const auto label = labels_toward(o.theta, o.phi);
  RecordConfig rc{KickedTopParams{two_j, o.kappa, o.p}, o.readout_ion.value_or(two_j), o.mu,
                  ReadoutPrep{o.theta_r, o.phi_r}, label[0], label[1], o.steps, o.seed};

  Json config{{"seed", o.seed},
              {"mu", num(o.mu)},
              {"theta_r", num(o.theta_r)},
              {"phi_r", num(o.phi_r)},
              {"steps", o.steps},
              {"params", {{"j", num(o.j)}, {"kappa", num(o.kappa)}, {"p", num(o.p)}}},
              {"readout_ion", rc.readout_ion},
              {"theta", num(o.theta)},
              {"phi", num(o.phi)}};
  const MeasurementRecord record = measurement_record(rc);

  std::string bits;
  bits.reserve(record.bits.size());
  int ones = 0;
  for (int b : record.bits) {
    bits.push_back(b ? '1' : '0');
    ones += b;
  }
  fs::path base = resolve_output(o.out, "record");
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  fs::path bits_path = base;
  bits_path += ".txt";
  fs::path sidecar_path = base;
  sidecar_path += ".json";
  {
    std::ofstream f(bits_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + bits_path.string());
    f << "# config " << config.dump() << '\n' << bits << '\n';
  }
  Json sidecar{{"schema", 1}};
  sidecar.update(config);
  sidecar["ones"] = ones;
  {
    std::ofstream f(sidecar_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + sidecar_path.string());
    f << sidecar.dump(2) << '\n';
  }
  Json rep = report("record", std::move(config));
  rep["bits"] = bits;
  rep["ones"] = ones;
  rep["files"] = {bits_path.string(), sidecar_path.string()};
  emit(out, rep);
  return kExitOk;
}

// ---------------------------------------------------------------- sequence

struct SequenceOptions {
  std::string config;
  double tol = 1e-8;
  bool require_factorization = false;
};

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::kX;
  if (s == "y") return Axis::kY;
  if (s == "z") return Axis::kZ;
  throw std::invalid_argument("axis must be x, y or z, got '" + s + "'");
}

Pulse parse_pulse(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "cond_disp") {
    const Complex beta{j.value("beta_re", 0.0), j.value("beta_im", 0.0)};
    const Json& w = j.at("weight");
    SpinWeight weight = CollectiveJz{};
    if (w.is_string()) {
      if (w.get<std::string>() != "jz") throw std::invalid_argument("weight must be \"jz\", an ion index or a list");
    } else if (w.is_number_integer()) {
      weight = SingleIon{w.get<int>()};
    } else if (w.is_array()) {
      weight = IonSetJz{w.get<std::vector<int>>()};
    } else {
      throw std::invalid_argument("weight must be \"jz\", an ion index or a list");
    }
    return ConditionalDisplacement{beta, weight};
  }
  if (type == "carrier") {
    CarrierPulse c{parse_axis(j.at("axis").get<std::string>()), j.at("angle").get<double>(), std::nullopt};
    if (j.contains("targets") && !j.at("targets").is_null()) c.targets = j.at("targets").get<std::vector<int>>();
    return c;
  }
  throw std::invalid_argument("pulse type must be cond_disp or carrier, got '" + type + "'");
}

int run_sequence(const SequenceOptions& o, std::ostream& out) {
  std::ifstream file(o.config);
  if (!file) throw std::invalid_argument("cannot read " + o.config);
  const Json input = Json::parse(file);
  const int n_ions = input.at("n_ions").get<int>();
  const std::string rep_name = input.value("representation", std::string("symmetric"));
  if (rep_name != "symmetric" && rep_name != "full") {
    throw std::invalid_argument("representation must be symmetric or full");
  }
  const SpinRegister reg =
      rep_name == "full" ? SpinRegister::full(n_ions) : SpinRegister::symmetric(n_ions);
  const FockMode mode(input.value("cutoff", FockMode::kDefaultCutoff));
  PulseSequence seq;
  for (const Json& p : input.at("pulses")) seq.push_back(parse_pulse(p));
  for (const Pulse& p : seq) validate_pulse(reg, mode, p);

  const ComplexMatrix joint = compose(reg, mode, seq);
  const double excursion = sequence_excursion(reg, seq);
  const int levels = trusted_fock_levels(mode, excursion);
  const Factorization f = factor_vibration(joint, reg.dim(), mode.dim(), std::max(levels, 1));

  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < f.spin_unitary.rows(); ++r) {
    Json rr = Json::array();
    Json ii = Json::array();
    for (Index c = 0; c < f.spin_unitary.cols(); ++c) {
      rr.push_back(num(f.spin_unitary(r, c).real()));
      ii.push_back(num(f.spin_unitary(r, c).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  const bool factorizes = f.residual < o.tol;
  Json rep = report("sequence", {{"file", o.config}, {"input", input}, {"tol", num(o.tol)}});
  rep["joint_dim"] = joint.rows();
  rep["excursion"] = num(excursion);
  rep["trusted_levels"] = f.trusted_levels;
  rep["residual"] = num(f.residual);
  rep["factorizes"] = factorizes;
  rep["spin_unitary"] = {{"re", std::move(re)}, {"im", std::move(im)}};
  emit(out, rep);
  return factorizes || !o.require_factorization ? kExitOk : kExitTolerance;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trapped-ion collective spin simulator", "ionsim"};
  app.require_subcommand(1);

  VerifyTopOptions top;
  auto* verify = app.add_subcommand("verify-top", "Check the four-pulse loop against exp(-i kx kp Jz^2)");
  VerifyTopOptions demo;
  auto* typo = app.add_subcommand("typo-demo", "Residuals of the commutator loop beside two non-closing orderings");
  for (auto [cmd, o] : {std::pair{verify, &top}, std::pair{typo, &demo}}) {
    cmd->add_option("--n", o->n, "Ion count")->check(CLI::Range(1, SpinRegister::kMaxSymmetricIons));
    cmd->add_option("--kx", o->kx, "Position-kick strength");
    cmd->add_option("--kp", o->kp, "Momentum-kick strength");
    cmd->add_option("--cutoff", o->cutoff, "Fock cutoff")->check(CLI::Range(FockMode::kMinCutoff, 512));
    cmd->add_option("--tol", o->tol, "Tolerance")->check(CLI::PositiveNumber);
  }
  verify->add_flag("--literal-order", top.literal_order, "Close the loop by repeating the momentum kick");

  CatOptions cat;
  auto* cat_cmd = app.add_subcommand("cat", "Cat-state preparation report");
  cat_cmd->add_option("--n", cat.n, "Ion count")->check(CLI::Range(1, SpinRegister::kMaxSymmetricIons));
  cat_cmd->add_option("--construction", cat.construction, "auto, pulses or direct")
      ->check(CLI::IsMember({"auto", "pulses", "direct"}));
  cat_cmd->add_option("--cutoff", cat.cutoff, "Fock cutoff")->check(CLI::Range(FockMode::kMinCutoff, 512));
  cat_cmd->add_option("--tol", cat.tol, "Tolerance")->check(CLI::PositiveNumber);

  KickedTopOptions kt;
  auto* kt_cmd = app.add_subcommand("kicked-top", "Quantum kicked-top trajectory and Husimi snapshots");
  kt_cmd->add_option("--j", kt.j, "Spin length (multiple of 1/2)");
  kt_cmd->add_option("--kappa", kt.kappa, "Twist strength");
  kt_cmd->add_option("--p", kt.p, "Kick angle");
  kt_cmd->add_option("--steps", kt.steps, "Number of kicks");
  kt_cmd->add_option("--theta", kt.theta, "Polar angle of the initial mean spin");
  kt_cmd->add_option("--phi", kt.phi, "Azimuth of the initial mean spin");
  kt_cmd->add_option("--husimi-every", kt.husimi_every, "Husimi snapshot interval, 0 for none");
  kt_cmd->add_option("--n-theta", kt.n_theta, "Husimi theta bins")->check(CLI::Range(1, 4096));
  kt_cmd->add_option("--n-phi", kt.n_phi, "Husimi phi bins")->check(CLI::Range(1, 4096));
  kt_cmd->add_option("--out", kt.out, "Output directory");

  ClassicalOptions cl;
  auto* cl_cmd = app.add_subcommand("classical", "Classical kicked-top map");
  cl_cmd->add_flag("--traj", cl.traj, "Write a trajectory CSV");
  cl_cmd->add_flag("--lyapunov", cl.lyapunov, "Print the Lyapunov exponent of one point");
  cl_cmd->add_flag("--lyap-map", cl.lyap_map, "Write a Lyapunov map CSV");
  cl_cmd->add_option("--kappa", cl.kappa, "Twist strength");
  cl_cmd->add_option("--p", cl.p, "Kick angle");
  cl_cmd->add_option("--steps", cl.steps, "Map iterations");
  cl_cmd->add_option("--x", cl.x, "Start x");
  cl_cmd->add_option("--y", cl.y, "Start y");
  cl_cmd->add_option("--z", cl.z, "Start z");
  cl_cmd->add_option("--theta", cl.theta, "Start polar angle (overrides x, y, z)");
  cl_cmd->add_option("--phi", cl.phi, "Start azimuth (overrides x, y, z)");
  cl_cmd->add_option("--order", cl.order, "kick-twist or twist-kick")
      ->check(CLI::IsMember({"kick-twist", "twist-kick"}));
  cl_cmd->add_option("--n-theta", cl.n_theta, "Map theta bins")->check(CLI::Range(1, 4096));
  cl_cmd->add_option("--n-phi", cl.n_phi, "Map phi bins")->check(CLI::Range(1, 4096));
  cl_cmd->add_option("--out", cl.out, "Output CSV path");

  GateOptions gate;
  auto* gate_cmd = app.add_subcommand("gate", "Ising or controlled-phase gate from pulses");
  gate_cmd->add_option("--type", gate.type, "ising or cphase")->check(CLI::IsMember({"ising", "cphase"}));
  gate_cmd->add_option("--n", gate.n, "Ion count")->check(CLI::Range(2, SpinRegister::kMaxFullIons));
  gate_cmd->add_option("--a", gate.a, "First ion");
  gate_cmd->add_option("--b", gate.b, "Second ion");
  gate_cmd->add_option("--chi", gate.chi, "Ising angle");
  gate_cmd->add_option("--cutoff", gate.cutoff, "Fock cutoff")->check(CLI::Range(FockMode::kMinCutoff, 512));
  gate_cmd->add_option("--tol", gate.tol, "Tolerance")->check(CLI::PositiveNumber);
  gate_cmd->add_flag("--literal-order", gate.literal_order, "Close the loop with a position kick");

  RecordOptions rec;
  auto* rec_cmd = app.add_subcommand("record", "Readout-ion measurement record of the kicked top");
  rec_cmd->add_option("--j", rec.j, "System spin length; 2j system ions plus one readout ion");
  rec_cmd->add_option("--kappa", rec.kappa, "Twist strength");
  rec_cmd->add_option("--p", rec.p, "Kick angle");
  rec_cmd->add_option("--readout-ion", rec.readout_ion, "Readout ion index (default: last)");
  rec_cmd->add_option("--mu", rec.mu, "Coupling strength");
  rec_cmd->add_option("--theta-r", rec.theta_r, "Readout preparation polar angle");
  rec_cmd->add_option("--phi-r", rec.phi_r, "Readout preparation azimuth");
  rec_cmd->add_option("--theta", rec.theta, "Polar angle of the initial mean spin");
  rec_cmd->add_option("--phi", rec.phi, "Azimuth of the initial mean spin");
  rec_cmd->add_option("--steps", rec.steps, "Number of kicks")->check(CLI::NonNegativeNumber);
  rec_cmd->add_option("--seed", rec.seed, "RNG seed");
  rec_cmd->add_option("--out", rec.out, "Output path without extension");

  SequenceOptions sq;
  auto* sq_cmd = app.add_subcommand("sequence", "Compose a pulse sequence from a JSON file");
  sq_cmd->add_option("--config", sq.config, "Pulse sequence JSON")->required();
  sq_cmd->add_option("--tol", sq.tol, "Factorization tolerance")->check(CLI::PositiveNumber);
  sq_cmd->add_flag("--require-factorization", sq.require_factorization, "Exit 3 if the mode does not factor out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return run_verify_top(top, out);
    if (*typo) return run_typo_demo(demo, out);
    if (*cat_cmd) return run_cat(cat, out);
    if (*kt_cmd) return run_kicked_top(kt, out);
    if (*cl_cmd) return run_classical(cl, out);
    if (*gate_cmd) return run_gate(gate, out);
    if (*rec_cmd) return run_record(rec, out);
    if (*sq_cmd) return run_sequence(sq, out);
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ionsim::cli
