#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/parallel.hpp"
#include "optomech/spectral.hpp"
#include "optomech/trace_io.hpp"
#include "tasks.hpp"

namespace optomech::cli {

using nlohmann::json;

namespace {

SimConfig sim_config(const RunConfig& rc, const DerivedParams& d) {
  const auto& s = rc.simulation;
  SimConfig c;
  c.frame = s.frame;
  c.dt = s.dt ? *s.dt : 0.5 * max_stable_dt(d, s.frame);
  c.duration = s.duration;
  c.burn_in = s.burn_in;
  c.record_decimation = s.decimation;
  c.harmonics_kept = s.harmonics;
  c.noise = s.noise;
  c.seed = rc.seed;
  c.channel_mask = s.frame == Frame::Lab ? channels::lab_all : channels::rotating_all;
  return c;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// One run per seed, seeds rc.seed, rc.seed + 1, ...
std::vector<TimeTrace> ensemble(const RunConfig& rc, const Operating& op, SimConfig c) {
  return parallel_map<TimeTrace>(rc.simulation.seeds, [&](std::size_t k) {
    SimConfig ck = c;
    ck.seed = rc.seed + k;
    return simulate(op.d, op.drive, ck);
  });
}

json trace_json(const std::vector<TimeTrace>& runs) {
  auto arr = json::array();
  for (const auto& t : runs)
    arr.push_back({{"seed", t.config.seed},
                   {"n_samples", t.n_samples},
                   {"instability_terminated", t.instability_terminated},
                   {"termination_time_s", t.termination_time}});
  return arr;
}

bool any_unstable(const std::vector<TimeTrace>& runs) {
  return std::any_of(runs.begin(), runs.end(), [](const TimeTrace& t) { return t.instability_terminated; });
}

std::size_t default_segment(std::size_t requested, std::size_t n) {
  return requested ? requested : std::max<std::size_t>(n / 16, 16);
}

void accumulate(SpectrumResult& acc, const SpectrumResult& s, bool first) {
  if (first) {
    acc = s;
    return;
  }
  for (std::size_t i = 0; i < s.values.size(); ++i) acc.values[i] += s.values[i];
  acc.pump_line_power += s.pump_line_power;
}

void scale(SpectrumResult& s, double f) {
  for (double& v : s.values) v *= f;
  s.pump_line_power *= f;
}

Table single_spectrum(const std::string& name, const SpectrumResult& s, const std::string& unit,
                      const std::string& label) {
  Table t{name, {{"omega_rad_s", "rad/s"}, {"psd_value", unit}, {"component_label", "-"}}, {}};
  for (std::size_t i = 0; i < s.omega.size(); ++i) t.add({s.omega[i], s.values[i], label});
  return t;
}

std::pair<double, double> mean_se(const std::vector<double>& v) {
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, std::nan("")};
  for (double x : v) s += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return {m, std::sqrt(s / (n - 1.0) / n)};
}

}  // namespace

int run_simulate(const RunConfig& rc, const RunOptions& opt, Artifacts& out) {
  const auto op = operating_point(derive(rc.circuit), rc.drive);
  const auto cfg = sim_config(rc, op.d);
  const auto runs = ensemble(rc, op, cfg);
  const auto& fmt = rc.simulation.trace_format;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const std::string stem = runs.size() == 1 ? "trace" : "trace_" + std::to_string(k);
    if (fmt == "binary" || fmt == "both") {
      write_trace_binary(runs[k], out.path(stem + ".bin").string());
      out.note_file(stem + ".bin");
    }
    if (fmt == "csv" || fmt == "both") {
      write_trace_csv(runs[k], out.path(stem + ".csv").string());
      out.note_file(stem + ".csv");
    }
  }
  // Ensemble-averaged Welch estimate over the runs that finished.
  SpectrumResult avg;
  std::size_t used = 0;
  const bool lab = cfg.frame == Frame::Lab;
  for (const auto& tr : runs) {
    if (tr.instability_terminated) continue;
    const std::size_t seg = default_segment(rc.simulation.segment_length, tr.n_samples);
    SpectrumResult s;
    if (lab) {
      WelchOptions w;
      w.segment_length = seg;
      s = welch_psd(tr, "V_out", w);
    } else {
      OutputSpectrumOptions o;
      o.segment_length = seg;
      s = output_spectrum_from_trace(tr, op.d, op.drive, o);
    }
    accumulate(avg, s, used++ == 0);
  }
  json meta = {{"frame", lab ? "lab" : "rotating"},
               {"dt_s", cfg.dt},
               {"duration_s", cfg.duration},
               {"record_decimation", cfg.record_decimation},
               {"params_hash", hex(params_hash(op.d.circuit))},
               {"V_p_V", op.drive.V_p},
               {"E_c_J", op.E_c},
               {"runs", trace_json(runs)},
               {"spectrum_runs", used}};
  if (used > 0) {
    scale(avg, 1.0 / static_cast<double>(used));
    if (lab) {
      out.table(single_spectrum("welch", avg, "V^2/(rad/s)", "V_out"));
    } else {
      out.table(single_spectrum("welch", avg, "W/(rad/s)", "simulated"));
      meta["pump_line_power_W"] = avg.pump_line_power;
      meta["pump_line_omega_rad_s"] = op.d.omega_c + op.drive.Delta;
    }
    out.plot({"Welch PSD", "welch", "omega_rad_s", {"psd_value"}, "component_label", false, true});
  }
  out.json("simulation.json", meta);
  return any_unstable(runs) && !opt.allow_instability ? exit_instability : exit_ok;
}

int run_compare(const RunConfig& rc, const RunOptions& opt, Artifacts& out) {
  if (rc.simulation.frame != Frame::Rotating)
    throw Error(Errc::InvalidSimConfig, "compare fits the rotating-frame x0 spectrum; set simulation.frame = \"rotating\"");
  const auto op = operating_point(derive(rc.circuit), rc.drive);
  const auto ba = back_action(op.d, op.drive, op.E_c);
  if (ba.unstable && !opt.allow_instability) return exit_instability;
  auto cfg = sim_config(rc, op.d);
  cfg.channel_mask = channels::x0;
  const auto runs = ensemble(rc, op, cfg);
  if (any_unstable(runs)) {
    out.json("compare.json", {{"runs", trace_json(runs)}});
    return opt.allow_instability ? exit_ok : exit_instability;
  }
  SpectrumResult avg;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& tr = runs[k];
    WelchOptions w;
    // The Hann kernel widens a Lorentzian by ~s^2/(fwhm/2); aim for a
    // segment spanning a few hundred damping times.
    const auto want = static_cast<std::size_t>(256.0 / std::abs(ba.Gamma_eff) / tr.dt);
    w.segment_length = rc.simulation.segment_length ? rc.simulation.segment_length
                                                    : std::min(want, tr.n_samples / 8);
    accumulate(avg, welch_psd(tr, "x0", w), k == 0);
  }
  scale(avg, 1.0 / static_cast<double>(runs.size()));
  const double hw = 5.0 * std::abs(ba.Gamma_eff);
  const auto fit = lorentzian_fit(avg, ba.delta_Omega_m - hw, ba.delta_Omega_m + hw);
  const auto& c = op.d.circuit;
  // <|x0|^2> = area / 2pi and <|x0|^2> = 2 k_B T_eff / (m Omega_m^2).
  const double to_T = c.m * c.Omega_m * c.Omega_m / (2.0 * k_B) / two_pi;
  Table t{"compare",
          {{"quantity", "-"}, {"unit", "-"}, {"analytic", "-"}, {"simulated", "-"}, {"sigma", "-"},
           {"rel_error", "1"}},
          {}};
  const auto row = [&](const char* q, const char* u, double a, double s, double sig) {
    t.add({std::string(q), std::string(u), a, s, sig, s / a - 1.0});
  };
  row("Gamma_eff", "rad/s", ba.Gamma_eff, fit.fwhm, fit.sigma[1]);
  row("delta_Omega_m", "rad/s", ba.delta_Omega_m, fit.center, fit.sigma[0]);
  row("T_eff", "K", ba.T_eff, fit.area * to_T, fit.sigma[2] * to_T);
  out.table(t);
  out.table(single_spectrum("x0_psd", avg, "m^2/(rad/s)", "simulated"));
  out.json("compare.json", {{"runs", trace_json(runs)},
                            {"fit", {{"center_rad_s", fit.center},
                                     {"fwhm_rad_s", fit.fwhm},
                                     {"area", fit.area},
                                     {"offset", fit.offset},
                                     {"reduced_chi2", fit.reduced_chi2},
                                     {"converged", fit.converged}}}});
  out.plot({"Envelope displacement PSD", "x0_psd", "omega_rad_s", {"psd_value"}, "", false, true});
  return exit_ok;
}

int run_asymmetry(const RunConfig& rc, const RunOptions& opt, Artifacts& out) {
  const auto op = operating_point(derive(rc.circuit), rc.drive);
  const auto& d = op.d;
  const double W = d.circuit.Omega_m;
  const auto ba = back_action(d, op.drive, op.E_c);
  const auto closed = sideband_asymmetry(d, op.drive, op.E_c);
  const auto general = apparent_force_psd(d, op.drive, op.E_c, 0.0);
  // Analytic sideband areas: integrate the observed displacement spectra
  // over the door, densely near the peak.
  const double w = 20.0 * std::max(std::abs(ba.Gamma_eff), d.circuit.Gamma_m);
  auto nu = linspace(-0.5 * W, 0.5 * W, 2001);
  for (double c : {-ba.delta_Omega_m, ba.delta_Omega_m}) {
    const auto f = linspace(c - w, c + w, 4001);
    nu.insert(nu.end(), f.begin(), f.end());
  }
  std::sort(nu.begin(), nu.end());
  nu.erase(std::unique(nu.begin(), nu.end()), nu.end());
  nu.erase(std::remove_if(nu.begin(), nu.end(), [&](double v) { return std::abs(v) > 0.5 * W; }), nu.end());
  const auto sd = sideband_displacement_psd(d, op.drive, op.E_c, nu);
  const double s2m = integrate_band(sd.nu, sd.S_minus, -0.5 * W, 0.5 * W);
  const double s2p = integrate_band(sd.nu, sd.S_plus, -0.5 * W, 0.5 * W);

  Table t{"asymmetry", {{"quantity", "-"}, {"unit", "-"}, {"value", "-"}, {"sigma", "-"}}, {}};
  const double nan = std::nan("");
  const auto row = [&](const std::string& q, const char* u, double v, double s = std::nan("")) {
    t.add({q, std::string(u), v, s});
  };
  row("S_L0_lab", "N^2 s", 0.25 * ba.S_L0);
  row("S_dF0_lab", "N^2 s", 0.25 * ba.S_dF0);
  row("S_dF_ex_l_closed", "N^2 s", closed.S_dF_ex_l.value_or(nan));
  row("S_dF_ex_h_closed", "N^2 s", closed.S_dF_ex_h.value_or(nan));
  row("S_dF_ex_l_response", "N^2 s", general.S_dF_ex_l);
  row("S_dF_ex_h_response", "N^2 s", general.S_dF_ex_h);
  row("sigma2_minus_analytic", "m^2", s2m);
  row("sigma2_plus_analytic", "m^2", s2p);
  row("asymmetry_analytic", "1", 2.0 * (s2m - s2p) / (s2m + s2p));

  int code = exit_ok;
  json meta = {{"scheme", scheme_name(op.drive.scheme)}, {"E_c_J", op.E_c}, {"back_action_unstable", ba.unstable}};
  if (rc.asymmetry.simulate) {
    if (rc.simulation.frame != Frame::Rotating)
      throw Error(Errc::InvalidSimConfig, "simulated sideband areas use the rotating frame");
    auto cfg = sim_config(rc, d);
    cfg.channel_mask = channels::outputs;
    const auto runs = ensemble(rc, op, cfg);
    meta["runs"] = trace_json(runs);
    if (any_unstable(runs)) {
      code = opt.allow_instability ? exit_ok : exit_instability;
    } else {
      const auto areas = parallel_map<SidebandAreas>(runs.size(), [&](std::size_t k) {
        OutputSpectrumOptions o;
        o.segment_length = default_segment(rc.simulation.segment_length, runs[k].n_samples);
        return sideband_areas(output_spectrum_from_trace(runs[k], d, op.drive, o), d, op.drive);
      });
      std::vector<double> m, p, a;
      for (const auto& s : areas) {
        m.push_back(s.sigma2_minus);
        p.push_back(s.sigma2_plus);
        a.push_back(2.0 * (s.sigma2_minus - s.sigma2_plus) / (s.sigma2_minus + s.sigma2_plus));
      }
      const auto [mm, ms] = mean_se(m);
      const auto [pm, ps] = mean_se(p);
      const auto [am, as] = mean_se(a);
      row("sigma2_minus_simulated", "m^2", mm, ms);
      row("sigma2_plus_simulated", "m^2", pm, ps);
      row("asymmetry_simulated", "1", am, as);
    }
  }
  out.table(t);
  out.json("asymmetry.json", meta);
  return code;
}

}  // namespace optomech::cli
