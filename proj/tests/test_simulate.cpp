#include <doctest.h>

#include <cmath>
#include <numeric>

#include "optomech/analytic.hpp"
#include "optomech/errors.hpp"
#include "optomech/simulate.hpp"
#include "optomech/spectral.hpp"
#include "support.hpp"

using namespace optomech;
using optomech::testing::rel_close;

namespace {

DerivedParams desk(double kappa_over_Omega = 0.5) {
  return derive(design_circuit(testing::desk_design(kappa_over_Omega)));
}

SimConfig base_config(const DerivedParams& d, double periods = 200.0) {
  SimConfig c;
  c.dt = 0.1 / d.circuit.Omega_m;
  c.duration = periods * two_pi / d.circuit.Omega_m;
  c.seed = 12345;
  c.record_decimation = 10;
  return c;
}

DriveParams drive_at(const DerivedParams& d, Scheme s, double g2_over_Gk) {
  const double W = d.circuit.Omega_m;
  const double D = s == Scheme::Red ? -W : (s == Scheme::Blue ? W : 0.0);
  const double E_c = energy_for_g2(d, g2_over_Gk * d.circuit.Gamma_m * d.kappa_t);
  return DriveParams::make(s, W, drive_for_energy(d, D, E_c));
}

double mean_norm(std::span<const cplx> v) {
  double acc = 0.0;
  for (auto z : v) acc += std::norm(z);
  return acc / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("simulate_rotating: identical inputs give bit-identical traces") {
  const auto d = desk();
  const auto drive = drive_at(d, Scheme::Red, 0.1);
  auto cfg = base_config(d);
  const auto a = simulate_rotating(d, drive, cfg);
  const auto b = simulate_rotating(d, drive, cfg);
  REQUIRE(a.channels.size() == b.channels.size());
  for (std::size_t i = 0; i < a.channels.size(); ++i) CHECK(a.channels[i].data == b.channels[i].data);
  CHECK(a.params_hash == b.params_hash);
  cfg.seed += 1;
  const auto c = simulate_rotating(d, drive, cfg);
  CHECK(a.channels[0].data != c.channels[0].data);
}

TEST_CASE("simulate_rotating: record layout and timing") {
  const auto d = desk();
  auto cfg = base_config(d, 50.0);
  cfg.burn_in = 0.0;
  cfg.channel_mask = channels::x0 | channels::V_h;
  const auto tr = simulate_rotating(d, drive_at(d, Scheme::Green, 0.1), cfg);
  REQUIRE(tr.channels.size() == 2);
  CHECK(tr.channels[0].name == "x0");
  CHECK(tr.channels[1].name == "V_h");
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  CHECK(tr.n_samples == steps / cfg.record_decimation);
  CHECK(tr.dt == doctest::Approx(cfg.dt * 10));
  CHECK(tr.t0 == doctest::Approx(5 * cfg.dt));
  CHECK(tr.complex_view("x0").size() == tr.n_samples);
  CHECK_THROWS_AS(tr.complex_view("mu_l"), Error);
  CHECK_THROWS_AS(tr.real_view("x0"), Error);
}

TEST_CASE("simulate_rotating: configuration errors") {
  const auto d = desk();
  const auto drive = drive_at(d, Scheme::Green, 0.1);
  auto code = [&](SimConfig c) {
    try {
      simulate_rotating(d, drive, c);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  auto c = base_config(d);
  c.dt = 2.0 * max_stable_dt(d, Frame::Rotating);
  CHECK(code(c) == Errc::InvalidSimConfig);
  c = base_config(d);
  c.duration = 0.0;
  CHECK(code(c) == Errc::InvalidSimConfig);
  c = base_config(d);
  c.record_decimation = 0;
  CHECK(code(c) == Errc::InvalidSimConfig);
  c = base_config(d);
  c.instability_factor = 0.5;
  CHECK(code(c) == Errc::InvalidSimConfig);
}

TEST_CASE("simulate_rotating: noise-free imposed motion sits on the linear response") {
  const auto d = desk();
  const double W = d.circuit.Omega_m;
  for (Scheme s : {Scheme::Red, Scheme::Green, Scheme::Blue}) {
    const auto drive = drive_at(d, s, 0.1);
    auto cfg = base_config(d, 20.0);
    cfg.noise = false;
    cfg.motion = MotionMode::Imposed;
    cfg.imposed_amplitude = 1e-12;
    const auto tr = simulate_rotating(d, drive, cfg);
    const cplx mu_p = pump_amplitude(d, drive);
    const auto chi = susceptibilities(drive.Delta, W, d.kappa_t);
    const cplx I(0.0, 1.0);
    const cplx mu_l = 0.5 * I * d.G * cfg.imposed_amplitude * mu_p * chi.chi_l;
    const cplx mu_h = 0.5 * I * d.G * cfg.imposed_amplitude * mu_p * chi.chi_h;
    const auto l = tr.complex_view("mu_l");
    const auto h = tr.complex_view("mu_h");
    const auto p = tr.complex_view("mu_p");
    for (std::size_t i = 0; i < tr.n_samples; i += 97) {
      CHECK(std::abs(l[i] - mu_l) <= 1e-12 * std::abs(mu_l));
      CHECK(std::abs(h[i] - mu_h) <= 1e-12 * std::abs(mu_h));
      CHECK(std::abs(p[i] - mu_p) <= 1e-14 * std::abs(mu_p));
    }
    // Detected pump line carries E_c kappa_detect.
    const auto vp = tr.complex_view("V_p");
    const double P = std::norm(vp[0]) / (2.0 * d.circuit.Z0);
    CHECK(rel_close(P, energy_flow(d, drive).P_pump, 1e-12));
  }
}

TEST_CASE("simulate_rotating: bare oscillator relaxes to equipartition") {
  // G = 0: x0 is an Ornstein-Uhlenbeck process with <|x0|^2> = 2 k_B T_m / (m Omega_m^2).
  auto r = testing::desk_design(0.5, 0.0);
  r.Gamma_m = 0.05 * r.Omega_m;
  const auto d = derive(design_circuit(r));
  auto cfg = base_config(d);
  cfg.duration = 4000.0 / d.circuit.Gamma_m;
  cfg.channel_mask = channels::x0;
  const auto tr = simulate_rotating(d, DriveParams::make(Scheme::Green, r.Omega_m, 0.0), cfg);
  // About duration * Gamma_m / 2 independent samples of an exponential variable.
  const double tol = 5.0 / std::sqrt(0.5 * cfg.duration * d.circuit.Gamma_m);
  CHECK(rel_close(mean_norm(tr.complex_view("x0")), thermal_x0_variance(d), tol));
}

TEST_CASE("simulate_rotating: deep blue pumping trips the instability flag") {
  const auto d = desk();
  const auto drive = drive_at(d, Scheme::Blue, 2.0);  // Gamma_opt ~ -8 Gamma_m
  REQUIRE(back_action(d, drive, energy_flow(d, drive).E_c).unstable);
  auto cfg = base_config(d, 4000.0);
  cfg.burn_in = 0.0;
  cfg.instability_factor = 30.0;
  const auto tr = simulate_rotating(d, drive, cfg);
  CHECK(tr.instability_terminated);
  CHECK(tr.termination_time > 0.0);
  const auto expected = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt)) / cfg.record_decimation;
  CHECK(tr.n_samples < expected);
}

TEST_CASE("simulate_rotating: channel selection does not disturb the physics") {
  const auto d = desk();
  const auto drive = drive_at(d, Scheme::Red, 0.1);
  auto cfg = base_config(d, 3000.0);
  cfg.noise = false;
  cfg.x0_initial = cplx(1e-12, 0.0);
  const auto all = simulate_rotating(d, drive, cfg);
  cfg.channel_mask = channels::x0;
  const auto only = simulate_rotating(d, drive, cfg);
  // Without noise the trajectories coincide exactly.
  CHECK(all.channel("x0")->data == only.channel("x0")->data);
}

TEST_CASE("output_spectrum_from_trace: pump line and door layout") {
  const auto d = desk();
  const auto drive = drive_at(d, Scheme::Green, 0.1);
  auto cfg = base_config(d, 400.0);
  cfg.record_decimation = 4;
  const auto tr = simulate_rotating(d, drive, cfg);
  OutputSpectrumOptions o;
  o.segment_length = 512;
  const auto s = output_spectrum_from_trace(tr, d, drive, o);
  CHECK(s.kind == SpectrumKind::OutputPSD);
  CHECK(std::is_sorted(s.omega.begin(), s.omega.end()));
  const double W = d.circuit.Omega_m;
  CHECK(s.omega.front() >= d.omega_c - 1.5 * W);
  CHECK(s.omega.back() < d.omega_c + 1.5 * W);
  // The pump line is dominated by the drive; its fluctuations are tiny here.
  CHECK(rel_close(s.pump_line_power, energy_flow(d, drive).P_pump, 1e-3));
  const double level = 2.0 * k_B * d.circuit.T_ex;
  double far = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < s.omega.size(); ++i)
    if (std::abs(s.omega[i] - d.omega_c) > 1.2 * W) {
      far += s.values[i];
      ++n;
    }
  CHECK(far / n == doctest::Approx(level).epsilon(0.1));
}

TEST_CASE("simulate_lab: noise-free demodulation matches the rotating amplitudes") {
  auto r = testing::desk_design(0.1);
  const auto d = derive(design_circuit(r));
  const double W = d.circuit.Omega_m;
  const auto drive = drive_at(d, Scheme::Green, 0.1);
  SimConfig cfg;
  cfg.frame = Frame::Lab;
  cfg.noise = false;
  cfg.motion = MotionMode::Imposed;
  cfg.imposed_amplitude = 1e-12;
  cfg.dt = max_stable_dt(d, Frame::Lab);
  cfg.record_decimation = 5000;  // exactly one mechanical period (omega_c = 100 Omega_m)
  cfg.duration = 40.0 * two_pi / W;
  cfg.burn_in = 10.0 / d.kappa_t;
  const auto lab = simulate_lab(d, drive, cfg);
  const auto l = lab.complex_view("demod_-1");
  const auto h = lab.complex_view("demod_1");
  const cplx mu_p = pump_amplitude(d, drive);
  const auto chi = susceptibilities(0.0, W, d.kappa_t);
  const cplx I(0.0, 1.0);
  const cplx mu_l = 0.5 * I * d.G * 1e-12 * mu_p * chi.chi_l;
  const cplx mu_h = 0.5 * I * d.G * 1e-12 * mu_p * chi.chi_h;
  const std::size_t last = lab.n_samples - 1;
  CHECK(std::abs(l[last] - mu_l) < 0.02 * std::abs(mu_l));
  CHECK(std::abs(h[last] - mu_h) < 0.02 * std::abs(mu_h));
  // RK4 at 50 steps per carrier cycle pulls the resonance by ~(omega_c dt)^4/120,
  // a 0.4% phase error against kappa_t/2 here.
  CHECK(std::abs(lab.complex_view("demod_0")[last] - mu_p) < 1e-2 * std::abs(mu_p));
  CHECK(lab.real_view("x").size() == lab.n_samples);
}

TEST_CASE("simulate dispatches on the frame") {
  const auto d = desk();
  auto cfg = base_config(d, 5.0);
  cfg.frame = Frame::Lab;
  cfg.dt = max_stable_dt(d, Frame::Lab);
  cfg.record_decimation = 100;
  cfg.burn_in = 0.0;
  const auto tr = simulate(d, drive_at(d, Scheme::Green, 0.1), cfg);
  CHECK(tr.channel("phi") != nullptr);
  CHECK(tr.channel("mu_p") == nullptr);
}
