#include "run_config.hpp"

#include <array>
#include <cmath>

namespace optomech::cli {

namespace {

constexpr std::array<const char*, 7> task_names = {"derive",   "spectrum", "sweep",    "simulate",
                                                   "compare",  "optimize", "asymmetry"};

TopologyKind topology_from(const Document& doc, const std::string& key) {
  const auto s = doc.string(key, "single_port");
  if (s == "single_port") return TopologyKind::SinglePort;
  if (s == "two_port") return TopologyKind::TwoPort;
  if (s == "bidirectional") return TopologyKind::Bidirectional;
  doc.fail(key, "expected single_port, two_port or bidirectional, got '" + s + "'");
}

Frame frame_from(const Document& doc, const std::string& key) {
  const auto s = doc.string(key, "rotating");
  if (s == "rotating") return Frame::Rotating;
  if (s == "lab") return Frame::Lab;
  doc.fail(key, "expected rotating or lab, got '" + s + "'");
}

std::size_t count(const Document& doc, const std::string& key, long long fallback, long long min) {
  const auto v = doc.integer(key, fallback);
  if (v < min) doc.fail(key, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

double positive(const Document& doc, const std::string& key, const std::string& unit) {
  const double v = doc.quantity(key, unit);
  if (!(v > 0.0)) doc.fail(key, "must be positive");
  return v;
}

double non_negative(const Document& doc, const std::string& key, const std::string& unit,
                    double fallback) {
  const double v = doc.quantity(key, unit, fallback);
  if (v < 0.0) doc.fail(key, "must not be negative");
  return v;
}

void read_mechanics_thermal(const Document& doc, double& m, double& Omega_m, double& Gamma_m, double& T_m,
                            double& T_in, double& T_ex, double& n_det) {
  m = positive(doc, "mechanics.m", "kg");
  Omega_m = positive(doc, "mechanics.Omega_m", "rad/s");
  Gamma_m = positive(doc, "mechanics.Gamma_m", "rad/s");
  T_m = non_negative(doc, "thermal.T_m", "K", 0.0);
  T_in = non_negative(doc, "thermal.T_in", "K", 0.0);
  T_ex = non_negative(doc, "thermal.T_ex", "K", 0.0);
  n_det = doc.quantity("thermal.n_det", "", 1.0);
  if (n_det < 1.0) doc.fail("thermal.n_det", "must be at least 1");
}

void read_circuit(const Document& doc, RunConfig& rc) {
  const bool lumped = doc.has_section("circuit");
  const bool rates = doc.has_section("rates");
  if (lumped && rates) doc.fail("rates", "give either [circuit] or [rates], not both");
  if (!lumped && !rates) return;
  rc.has_circuit = true;
  if (lumped) {
    auto& c = rc.circuit;
    c.L = positive(doc, "circuit.L", "H");
    c.C_c = positive(doc, "circuit.C_c", "F");
    c.C_k = non_negative(doc, "circuit.C_k", "F", 0.0);
    c.C_g0 = positive(doc, "circuit.C_g0", "F");
    c.dCg_dx = doc.quantity("circuit.dCg_dx", "F/m");
    c.R_in = positive(doc, "circuit.R_in", "ohm");
    c.Z0 = doc.has("circuit.Z0") ? positive(doc, "circuit.Z0", "ohm") : 50.0;
    c.topology.kind = topology_from(doc, "circuit.topology");
    if (c.topology.kind == TopologyKind::TwoPort) {
      c.topology.C_c1 = positive(doc, "circuit.C_c1", "F");
      c.topology.C_c2 = positive(doc, "circuit.C_c2", "F");
      if (std::abs(c.topology.C_c1 + c.topology.C_c2 - c.C_c) > 1e-9 * c.C_c)
        doc.fail("circuit.C_c2", "C_c1 + C_c2 must equal C_c");
    }
    read_mechanics_thermal(doc, c.m, c.Omega_m, c.Gamma_m, c.T_m, c.T_in, c.T_ex, c.n_det);
    return;
  }
  RateDesign r;
  r.omega_c = positive(doc, "rates.omega_c", "rad/s");
  r.kappa_ex = positive(doc, "rates.kappa_ex", "rad/s");
  r.kappa_in = positive(doc, "rates.kappa_in", "rad/s");
  r.Z0 = doc.has("rates.Z0") ? positive(doc, "rates.Z0", "ohm") : 50.0;
  r.C_t = doc.has("rates.C_t") ? positive(doc, "rates.C_t", "F") : 1e-12;
  r.C_g0_fraction = doc.quantity("rates.C_g0_fraction", "", 0.1);
  if (!(r.C_g0_fraction > 0.0 && r.C_g0_fraction < 1.0))
    doc.fail("rates.C_g0_fraction", "must lie in (0, 1)");
  r.G = doc.quantity("rates.G", "rad/s/m");
  r.topology = topology_from(doc, "rates.topology");
  r.kappa_1_fraction = doc.quantity("rates.kappa_1_fraction", "", 0.5);
  if (!(r.kappa_1_fraction > 0.0 && r.kappa_1_fraction < 1.0))
    doc.fail("rates.kappa_1_fraction", "must lie in (0, 1)");
  read_mechanics_thermal(doc, r.m, r.Omega_m, r.Gamma_m, r.T_m, r.T_in, r.T_ex, r.n_det);
  rc.rates = r;
  rc.circuit = design_circuit(r);
}

void read_drive(const Document& doc, RunConfig& rc) {
  if (!doc.has_section("drive")) return;
  rc.has_drive = true;
  auto& d = rc.drive;
  const auto s = doc.string("drive.scheme", "green");
  if (s == "red") d.scheme = Scheme::Red;
  else if (s == "green") d.scheme = Scheme::Green;
  else if (s == "blue") d.scheme = Scheme::Blue;
  else if (s == "custom") d.scheme = Scheme::Custom;
  else doc.fail("drive.scheme", "expected red, green, blue or custom, got '" + s + "'");
  if (d.scheme == Scheme::Custom) {
    d.Delta = doc.quantity("drive.Delta", "rad/s");
  } else if (doc.has("drive.Delta")) {
    doc.fail("drive.Delta", "only valid with scheme = \"custom\"");
  }
  const bool vp = doc.has("drive.V_p"), nc = doc.has("drive.n_c");
  if (vp && nc) doc.fail("drive.n_c", "give the drive as V_p or as n_c, not both");
  if (!vp && !nc) doc.fail("drive.V_p", "the drive needs V_p or n_c");
  if (vp) d.V_p = non_negative(doc, "drive.V_p", "V", 0.0);
  if (nc) d.n_c = non_negative(doc, "drive.n_c", "", 0.0);
}

void read_output(const Document& doc, RunConfig& rc) {
  rc.out_dir = doc.string("output.dir", rc.out_dir);
  if (doc.has("output.formats")) {
    rc.formats = {false, false};
    for (const auto& f : doc.strings("output.formats")) {
      if (f == "csv") rc.formats.csv = true;
      else if (f == "json") rc.formats.json = true;
      else doc.fail("output.formats", "unknown format '" + f + "' (csv, json)");
    }
    if (!rc.formats.csv && !rc.formats.json) doc.fail("output.formats", "needs at least one format");
  }
}

void read_blocks(const Document& doc, RunConfig& rc) {
  auto& sp = rc.spectrum;
  sp.kind = doc.string("spectrum.kind", sp.kind);
  if (sp.kind != "output" && sp.kind != "displacement")
    doc.fail("spectrum.kind", "expected output or displacement");
  sp.frame = frame_from(doc, "spectrum.frame");
  sp.span = non_negative(doc, "spectrum.span", "", 0.0);
  sp.points = count(doc, "spectrum.points", static_cast<long long>(sp.points), 3);

  auto& sw = rc.sweep;
  sw.detuning_min = doc.quantity("sweep.detuning_min", "", sw.detuning_min);
  sw.detuning_max = doc.quantity("sweep.detuning_max", "", sw.detuning_max);
  if (!(sw.detuning_max > sw.detuning_min)) doc.fail("sweep.detuning_max", "must exceed detuning_min");
  sw.points = count(doc, "sweep.points", static_cast<long long>(sw.points), 2);
  if (doc.has("sweep.kappa_t_over_2Omega")) {
    sw.kappa_t_over_2Omega = doc.quantities("sweep.kappa_t_over_2Omega", "");
    for (double k : sw.kappa_t_over_2Omega)
      if (!(k > 0.0)) doc.fail("sweep.kappa_t_over_2Omega", "values must be positive");
    if (!rc.rates)
      doc.fail("sweep.kappa_t_over_2Omega", "varying kappa_t needs the circuit given as [rates]");
  }

  auto& sim = rc.simulation;
  sim.frame = frame_from(doc, "simulation.frame");
  if (doc.has("simulation.dt")) {
    const bool is_auto = [&] {
      try {
        return doc.string("simulation.dt") == "auto";
      } catch (const ConfigError&) {
        return false;
      }
    }();
    if (!is_auto) sim.dt = positive(doc, "simulation.dt", "s");
  }
  if (doc.has("simulation.duration")) sim.duration = positive(doc, "simulation.duration", "s");
  if (doc.has("simulation.burn_in")) sim.burn_in = non_negative(doc, "simulation.burn_in", "s", 0.0);
  sim.decimation = count(doc, "simulation.decimation", 1, 1);
  sim.harmonics = static_cast<int>(count(doc, "simulation.harmonics", 1, 0));
  sim.noise = doc.boolean("simulation.noise", true);
  sim.seeds = count(doc, "simulation.seeds", 1, 1);
  sim.segment_length = count(doc, "simulation.segment_length", 0, 0);
  sim.trace_format = doc.string("simulation.trace_format", sim.trace_format);
  if (sim.trace_format != "binary" && sim.trace_format != "csv" && sim.trace_format != "both" &&
      sim.trace_format != "none")
    doc.fail("simulation.trace_format", "expected binary, csv, both or none");

  auto& op = rc.optimize;
  op.from_figures = doc.has("optimize.coupling_figure");
  if (op.from_figures) {
    op.coupling_figure = positive(doc, "optimize.coupling_figure", "");
    op.kappa_ex_over_kappa_t = doc.quantity("optimize.kappa_ex_over_kappa_t", "", op.kappa_ex_over_kappa_t);
    op.delta_omega_over_Gamma = doc.quantity("optimize.delta_omega_over_Gamma", "", op.delta_omega_over_Gamma);
    op.n_det = doc.quantity("optimize.n_det", "", op.n_det);
    op.n_c_th = non_negative(doc, "optimize.n_c_th", "", 0.0);
    op.n_ex_th = non_negative(doc, "optimize.n_ex_th", "", op.n_c_th);
    op.n_m_th = non_negative(doc, "optimize.n_m_th", "", 0.0);
    op.kappa_t_over_Omega = doc.quantity("optimize.kappa_t_over_Omega", "", op.kappa_t_over_Omega);
    op.Gamma_over_Omega = doc.quantity("optimize.Gamma_over_Omega", "", op.Gamma_over_Omega);
  } else {
    op.delta_omega = non_negative(doc, "optimize.delta_omega", "rad/s", 0.0);
  }
  op.n_c_min = doc.quantity("optimize.n_c_min", "", op.n_c_min);
  op.n_c_max = doc.quantity("optimize.n_c_max", "", op.n_c_max);
  if (!(op.n_c_min > 0.0 && op.n_c_max > op.n_c_min))
    doc.fail("optimize.n_c_max", "need 0 < n_c_min < n_c_max");
  op.points = count(doc, "optimize.points", static_cast<long long>(op.points), 3);

  rc.asymmetry.simulate = doc.boolean("asymmetry.simulate", false);
}

void require_for_task(const Document& doc, const RunConfig& rc) {
  const auto need_circuit = [&] {
    if (!rc.has_circuit) doc.fail("circuit", std::string("task '") + task_name(rc.task) + "' needs [circuit] or [rates]");
  };
  const auto need_drive = [&] {
    if (!rc.has_drive) doc.fail("drive", std::string("task '") + task_name(rc.task) + "' needs a [drive] section");
  };
  const auto need_duration = [&] {
    if (!(rc.simulation.duration > 0.0)) doc.fail("simulation.duration", "required for this task");
  };
  switch (rc.task) {
    case Task::Derive: need_circuit(); break;
    case Task::Spectrum:
    case Task::Sweep: need_circuit(); need_drive(); break;
    case Task::Simulate:
    case Task::Compare: need_circuit(); need_drive(); need_duration(); break;
    case Task::Optimize:
      if (!rc.optimize.from_figures) {
        need_circuit();
        need_drive();
      }
      break;
    case Task::Asymmetry:
      need_circuit();
      need_drive();
      if (rc.drive.scheme == Scheme::Custom) doc.fail("drive.scheme", "asymmetry needs red, green or blue");
      if (rc.asymmetry.simulate) need_duration();
      break;
  }
  if (rc.task == Task::Compare && rc.drive.scheme == Scheme::Green)
    doc.fail("drive.scheme", "compare fits the back-action shifted peak; use red, blue or custom");
}

}  // namespace

const char* task_name(Task t) noexcept { return task_names[static_cast<std::size_t>(t)]; }

std::optional<Task> task_from_name(const std::string& name) {
  for (std::size_t i = 0; i < task_names.size(); ++i)
    if (name == task_names[i]) return static_cast<Task>(i);
  return std::nullopt;
}

RunConfig build_run_config(const Document& doc, Task task) {
  RunConfig rc;
  rc.task = task;
  if (doc.has("task")) {
    const auto named = doc.string("task");
    const auto t = task_from_name(named);
    if (!t) doc.fail("task", "unknown task '" + named + "'");
    if (*t != task)
      doc.fail("task", "file names task '" + named + "' but the command line asks for '" + task_name(task) + "'");
  }
  const auto seed = doc.integer("seed", 1);
  if (seed < 0) doc.fail("seed", "must not be negative");
  rc.seed = static_cast<std::uint64_t>(seed);
  read_output(doc, rc);
  read_circuit(doc, rc);
  read_drive(doc, rc);
  read_blocks(doc, rc);
  require_for_task(doc, rc);
  doc.reject_unused();
  return rc;
}

RunConfig load_run_config(const std::string& path, Task task) {
  return build_run_config(Document::load(path), task);
}

}  // namespace optomech::cli
