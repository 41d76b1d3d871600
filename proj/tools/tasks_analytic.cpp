#include <algorithm>
#include <cmath>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/parallel.hpp"
#include "optomech/readout.hpp"
#include "optomech/spectrum.hpp"
#include "tasks.hpp"

namespace optomech::cli {

using nlohmann::json;

Operating operating_point(const DerivedParams& d, const DriveBlock& b) {
  Operating op{d, DriveParams::make(b.scheme, d.circuit.Omega_m, 0.0, b.Delta), 0.0};
  if (b.n_c) {
    op.E_c = *b.n_c * hbar * d.omega_c;
    op.drive.V_p = op.E_c > 0.0 ? drive_for_energy(d, op.drive.Delta, op.E_c) : 0.0;
  } else {
    op.drive.V_p = b.V_p.value_or(0.0);
    op.E_c = energy_flow(d, op.drive).E_c;
  }
  validate_drive(d, op.drive);
  return op;
}

namespace {

json circuit_json(const CircuitParams& c) {
  return {{"L_H", c.L},           {"C_c_F", c.C_c},         {"C_k_F", c.C_k},
          {"C_g0_F", c.C_g0},     {"dCg_dx_F_per_m", c.dCg_dx}, {"R_in_ohm", c.R_in},
          {"Z0_ohm", c.Z0},       {"topology", topology_name(c.topology.kind)},
          {"C_c1_F", c.topology.C_c1}, {"C_c2_F", c.topology.C_c2},
          {"m_kg", c.m},          {"Omega_m_rad_s", c.Omega_m}, {"Gamma_m_rad_s", c.Gamma_m},
          {"T_m_K", c.T_m},       {"T_in_K", c.T_in},       {"T_ex_K", c.T_ex},
          {"n_det", c.n_det}};
}

json derived_json(const DerivedParams& d) {
  return {{"C_t_F", d.C_t},
          {"omega_c_rad_s", d.omega_c},
          {"R_ex_ohm", d.R_ex},
          {"kappa_ex_rad_s", d.kappa_ex},
          {"kappa_in_rad_s", d.kappa_in},
          {"kappa_t_rad_s", d.kappa_t},
          {"kappa_1_rad_s", d.kappa_1},
          {"kappa_2_rad_s", d.kappa_2},
          {"Q_in", d.Q_in},
          {"Q_ex", d.Q_ex},
          {"Q_t", d.Q_t},
          {"G_rad_s_per_m", d.G},
          {"x_zpf_m", d.x_zpf},
          {"g0_rad_s", d.g0},
          {"T_c_K", d.T_c},
          {"xbar2_m2_per_J", d.xbar2}};
}

// Uniform grid over [lo, hi] refined with `dense` points within +-w of each centre.
std::vector<double> refined_grid(double lo, double hi, std::size_t n, const std::vector<double>& centres,
                                 double w, std::size_t dense = 401) {
  auto g = linspace(lo, hi, n);
  for (double c : centres) {
    const double a = std::max(lo, c - w), b = std::min(hi, c + w);
    if (b > a) {
      const auto f = linspace(a, b, dense);
      g.insert(g.end(), f.begin(), f.end());
    }
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

Table spectrum_table(const std::string& name, const SpectrumResult& s, const std::string& unit) {
  Table t{name, {{"omega_rad_s", "rad/s"}, {"psd_value", unit}, {"component_label", "-"}}, {}};
  for (std::size_t i = 0; i < s.omega.size(); ++i) t.add({s.omega[i], s.values[i], std::string("total")});
  for (const auto& c : s.components)
    for (std::size_t i = 0; i < s.omega.size(); ++i) t.add({s.omega[i], c.values[i], c.label});
  return t;
}

json back_action_json(const BackActionResult& ba) {
  return {{"g2_rad2_s2", ba.g2},
          {"delta_Omega_m_rad_s", ba.delta_Omega_m},
          {"Gamma_opt_rad_s", ba.Gamma_opt},
          {"Gamma_opt_prime_rad_s", ba.Gamma_opt_prime},
          {"Gamma_eff_rad_s", ba.Gamma_eff},
          {"S_L0_N2_s", ba.S_L0},
          {"S_dF0_N2_s", ba.S_dF0},
          {"T_eff_K", ba.T_eff},
          {"unstable", ba.unstable}};
}

}  // namespace

int run_derive(const RunConfig& rc, Artifacts& out) {
  const auto d = derive(rc.circuit);
  const auto eff = topology_map(d);
  json j;
  j["circuit"] = circuit_json(d.circuit);
  j["derived"] = derived_json(d);
  j["couplings"] = {{"kappa_drive_rad_s", eff.kappa_drive},
                    {"kappa_detect_rad_s", eff.kappa_detect},
                    {"output_prefactor", eff.output_prefactor}};
  j["params_hash"] = params_hash(d.circuit);
  const auto pop0 = populations(d, 0.0);
  j["populations"] = {{"n_c", pop0.n_c}, {"n_c_th", pop0.n_c_th}, {"n_ex_th", pop0.n_ex_th},
                      {"n_m_th", pop0.n_m_th}};
  if (rc.has_drive) {
    const auto op = operating_point(d, rc.drive);
    const auto pop = populations(d, op.E_c);
    const auto flow = energy_flow(d, op.drive);
    j["populations"]["n_c"] = pop.n_c;
    j["drive"] = {{"scheme", scheme_name(op.drive.scheme)},
                  {"Delta_rad_s", op.drive.Delta},
                  {"V_p_V", op.drive.V_p},
                  {"E_c_J", op.E_c},
                  {"P_in_W", flow.P_in},
                  {"P_pump_W", flow.P_pump}};
    j["back_action"] = back_action_json(back_action(d, op.drive, op.E_c));
  }
  out.json("derived.json", j);
  return exit_ok;
}

int run_spectrum(const RunConfig& rc, Artifacts& out) {
  const auto op = operating_point(derive(rc.circuit), rc.drive);
  const auto& d = op.d;
  const double W = d.circuit.Omega_m;
  const auto ba = back_action(d, op.drive, op.E_c);
  const double w = 20.0 * std::max(std::abs(ba.Gamma_eff), d.circuit.Gamma_m);
  const auto& sp = rc.spectrum;
  SpectrumResult s;
  std::string unit;
  if (sp.kind == "output") {
    const double span = sp.span > 0.0 ? sp.span : 1.5;
    const double wp = d.omega_c + op.drive.Delta;
    const double shift = ba.delta_Omega_m;
    const auto grid = refined_grid(wp - span * W, wp + span * W, sp.points,
                                   {wp - W - shift, wp + W + shift}, w);
    s = output_psd(d, op.drive, op.E_c, grid);
    unit = "W/(rad/s)";
  } else {
    const bool lab = sp.frame == Frame::Lab;
    const double span = sp.span > 0.0 ? sp.span : (lab ? 1.5 : 0.05);
    const std::vector<double> centres =
        lab ? std::vector<double>{-W - ba.delta_Omega_m, W + ba.delta_Omega_m} : std::vector<double>{ba.delta_Omega_m};
    s = displacement_psd(d, op.drive, op.E_c, refined_grid(-span * W, span * W, sp.points, centres, w), sp.frame);
    unit = "m^2/(rad/s)";
  }
  out.table(spectrum_table("spectrum", s, unit));
  json meta = {{"kind", spectrum_kind_name(s.kind)},
               {"unit", unit},
               {"scheme", scheme_name(op.drive.scheme)},
               {"E_c_J", op.E_c},
               {"unstable", s.unstable},
               {"overlap_warning", s.overlap_warning},
               {"back_action", back_action_json(ba)}};
  if (sp.kind == "output") {
    meta["pump_line_omega_rad_s"] = s.pump_line_omega;
    meta["pump_line_power_W"] = s.pump_line_power;
  } else {
    meta["frame"] = sp.frame == Frame::Lab ? "lab" : "rotating";
  }
  out.json("spectrum_meta.json", meta);
  out.plot({"PSD by component", "spectrum", "omega_rad_s", {"psd_value"}, "component_label", false, true});
  return exit_ok;
}

int run_sweep(const RunConfig& rc, Artifacts& out) {
  struct Case {
    double k_over_2W;
    DerivedParams d;
  };
  std::vector<Case> cases;
  if (rc.sweep.kappa_t_over_2Omega.empty()) {
    const auto d = derive(rc.circuit);
    cases.push_back({d.kappa_t / (2.0 * d.circuit.Omega_m), d});
  } else {
    for (double k : rc.sweep.kappa_t_over_2Omega) {
      RateDesign r = *rc.rates;
      const double kt = 2.0 * k * r.Omega_m;
      const double share = r.kappa_ex / (r.kappa_ex + r.kappa_in);
      r.kappa_ex = share * kt;
      r.kappa_in = (1.0 - share) * kt;
      cases.push_back({k, derive(design_circuit(r))});
    }
  }
  const auto& sw = rc.sweep;
  const auto units = linspace(sw.detuning_min, sw.detuning_max, sw.points);
  // The cavity energy follows the configured drive at its own detuning.
  const auto curves = parallel_map<std::vector<DetuningSweepPoint>>(cases.size(), [&](std::size_t i) {
    const auto& d = cases[i].d;
    const double E_c = operating_point(d, rc.drive).E_c;
    std::vector<double> Delta(units.size());
    for (std::size_t j = 0; j < units.size(); ++j) Delta[j] = units[j] * d.circuit.Omega_m;
    return detuning_sweep(d, E_c, Delta);
  });
  Table t{"sweep",
          {{"kappa_t_over_2Omega", "1"},
           {"Delta_over_Omega", "1"},
           {"Delta_rad_s", "rad/s"},
           {"delta_Omega_m_rad_s", "rad/s"},
           {"Gamma_opt_rad_s", "rad/s"},
           {"Gamma_opt_prime_rad_s", "rad/s"},
           {"T_eff_K", "K"},
           {"unstable", "1"}},
          {}};
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (std::size_t j = 0; j < units.size(); ++j) {
      const auto& p = curves[i][j];
      t.add({cases[i].k_over_2W, units[j], p.Delta, p.delta_Omega_m, p.Gamma_opt, p.Gamma_opt_prime, p.T_eff,
             p.unstable ? 1.0 : 0.0});
    }
  out.table(t);
  out.plot({"Optical spring", "sweep", "Delta_over_Omega", {"delta_Omega_m_rad_s"}, "kappa_t_over_2Omega"});
  out.plot({"Optical damping", "sweep", "Delta_over_Omega", {"Gamma_opt_rad_s", "Gamma_opt_prime_rad_s"},
            "kappa_t_over_2Omega"});
  out.plot({"Effective temperature", "sweep", "Delta_over_Omega", {"T_eff_K"}, "kappa_t_over_2Omega", false, true});
  return exit_ok;
}

int run_optimize(const RunConfig& rc, Artifacts& out) {
  const auto& o = rc.optimize;
  ReadoutModel m;
  if (o.from_figures) {
    m = readout_from_figures(o.coupling_figure, o.kappa_ex_over_kappa_t, o.delta_omega_over_Gamma, o.n_det,
                             o.n_c_th, o.n_ex_th, o.n_m_th, o.kappa_t_over_Omega, o.Gamma_over_Omega);
  } else {
    const auto op = operating_point(derive(rc.circuit), rc.drive);
    const double bw = o.delta_omega > 0.0 ? o.delta_omega : 6.0 * op.d.circuit.Gamma_m;
    m = readout_model(op.d, op.drive, op.d.circuit.n_det, bw);
  }
  const auto pts = scl_scan(m, logspace(o.n_c_min, o.n_c_max, o.points));
  Table t{"optimize", {{"n_c", "1"}, {"inverse_ratio", "1"}, {"S_ig", "rad^2/s^2"}, {"N_oise", "rad^2/s^2"}}, {}};
  for (const auto& p : pts) t.add({p.n_c, p.inverse_ratio, p.S_ig, p.N_oise});
  out.table(t);
  const auto closed = scl_optimum(m);
  const auto scan = scl_scan_optimum(m, o.n_c_min, o.n_c_max);
  const auto q = quantum_reference(m.kappa_ex / m.kappa_t, m.delta_omega / m.Gamma_m);
  const auto best = std::min_element(pts.begin(), pts.end(),
                                     [](const auto& a, const auto& b) { return a.inverse_ratio < b.inverse_ratio; });
  json j = {{"closed_form", {{"n_c_star", closed.n_c_star},
                             {"ratio_star", closed.ratio_star},
                             {"closed_form", closed.closed_form},
                             {"assumption_violated", closed.assumption_violated}}},
            {"numerical", {{"n_c_star", scan.n_c_star}, {"ratio_star", scan.ratio_star}}},
            {"grid_minimum", {{"n_c", best->n_c}, {"inverse_ratio", best->inverse_ratio}}},
            {"quantum_reference", {{"n_c_star", q.n_c_star}, {"ratio_star", q.ratio_star}}},
            {"model", {{"kappa_t_rad_s", m.kappa_t},
                       {"kappa_ex_rad_s", m.kappa_ex},
                       {"Omega_m_rad_s", m.Omega_m},
                       {"Gamma_m_rad_s", m.Gamma_m},
                       {"g0_rad_s", m.g0},
                       {"n_det", m.n_det},
                       {"n_c_th", m.n_c_th},
                       {"n_ex_th", m.n_ex_th},
                       {"n_m_th", m.n_m_th},
                       {"delta_omega_rad_s", m.delta_omega}}}};
  out.json("optimum.json", j);
  out.plot({"Inverse signal-to-noise ratio", "optimize", "n_c", {"inverse_ratio"}, "", true, true});
  return exit_ok;
}

int run_task(const RunConfig& rc, const RunOptions& opt, Artifacts& out) {
  switch (rc.task) {
    case Task::Derive: return run_derive(rc, out);
    case Task::Spectrum: return run_spectrum(rc, out);
    case Task::Sweep: return run_sweep(rc, out);
    case Task::Optimize: return run_optimize(rc, out);
    case Task::Simulate: return run_simulate(rc, opt, out);
    case Task::Compare: return run_compare(rc, opt, out);
    case Task::Asymmetry: return run_asymmetry(rc, opt, out);
  }
  return exit_ok;
}

}  // namespace optomech::cli
