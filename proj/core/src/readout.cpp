#include "optomech/readout.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

ReadoutModel readout_model(const DerivedParams& d, const DriveParams& drive, double n_det,
                           double delta_omega) {
  validate_drive(d, drive);
  const auto pop = populations(d, 0.0);
  ReadoutModel m;
  m.scheme = drive.scheme;
  m.kappa_t = d.kappa_t;
  m.kappa_ex = topology_map(d).kappa_detect;
  m.Omega_m = d.circuit.Omega_m;
  m.Gamma_m = d.circuit.Gamma_m;
  m.g0 = d.g0;
  m.n_det = n_det;
  m.n_c_th = pop.n_c_th;
  m.n_ex_th = pop.n_ex_th;
  m.n_m_th = pop.n_m_th;
  m.delta_omega = delta_omega;
  m.Delta = drive.Delta;
  return m;
}

ReadoutModel readout_from_figures(double coupling_figure, double kappa_ex_over_kappa_t,
                                  double delta_omega_over_Gamma, double n_det, double n_c_th,
                                  double n_ex_th, double n_m_th, double kappa_t_over_Omega,
                                  double Gamma_over_Omega) {
  if (!(coupling_figure > 0.0) || !(kappa_ex_over_kappa_t > 0.0) ||
      !(kappa_ex_over_kappa_t <= 1.0) || !(delta_omega_over_Gamma > 0.0) ||
      !(kappa_t_over_Omega > 0.0) || !(Gamma_over_Omega > 0.0))
    throw Error(Errc::InvalidParameter, "readout figures must be positive (kappa_ex <= kappa_t)");
  ReadoutModel m;
  m.scheme = Scheme::Green;
  m.Omega_m = 1.0;
  m.kappa_t = kappa_t_over_Omega;
  m.kappa_ex = kappa_ex_over_kappa_t * m.kappa_t;
  m.Gamma_m = Gamma_over_Omega;
  m.g0 = std::sqrt(m.Gamma_m * m.Omega_m * m.Omega_m / (m.kappa_t * coupling_figure));
  m.n_det = n_det;
  m.n_c_th = n_c_th;
  m.n_ex_th = n_ex_th;
  m.n_m_th = n_m_th;
  m.delta_omega = delta_omega_over_Gamma * m.Gamma_m;
  return m;
}

SignalNoise signal_noise(const ReadoutModel& m, double n_c) {
  if (!(n_c >= 0.0)) throw Error(Errc::InvalidParameter, "n_c must be >= 0");
  if (m.scheme == Scheme::Custom)
    throw Error(Errc::UnsupportedScheme, "signal/noise budget needs a canonical scheme");
  const double k = m.kappa_t;
  const double W = m.Omega_m;
  const double g2 = m.g0 * m.g0 * n_c;

  double Gamma_eff = m.Gamma_m;
  double omega_imp = 0.0;
  double chi_sum = 0.0;
  double asym_l = 0.0;
  double asym_h = 0.0;
  if (m.scheme == Scheme::Green) {
    omega_imp = W;
    chi_sum = 2.0 / (W * W);
    asym_l = m.n_ex_th;
    asym_h = -m.n_ex_th;
  } else {
    const auto s = susceptibilities(m.Delta, W, k);
    chi_sum = std::norm(s.chi_l) + std::norm(s.chi_h);
    const double Dh = (m.Delta + W) * (m.Delta + W) + 0.25 * k * k;
    const double Dl = (m.Delta - W) * (m.Delta - W) + 0.25 * k * k;
    Gamma_eff = m.Gamma_m + g2 * k * (1.0 / Dh - 1.0 / Dl);
    if (m.scheme == Scheme::Blue) asym_l = 2.0 * m.n_c_th - m.n_ex_th;
    if (m.scheme == Scheme::Red) asym_h = m.n_ex_th - 2.0 * m.n_c_th;
  }

  const double imp = k * (m.delta_omega / two_pi) *
                     (m.n_det * k / (16.0 * m.kappa_ex) * (1.0 + 4.0 * omega_imp * omega_imp / (k * k)) +
                      m.n_c_th - m.n_ex_th);
  const double ba = g2 * g2 * k * m.n_c_th * chi_sum / Gamma_eff;
  const double noise = imp + ba;
  const double base = m.n_m_th * m.Gamma_m / Gamma_eff;

  SignalNoise r;
  r.unstable = !(Gamma_eff > 0.0);
  r.l = {g2 * (base + asym_l), noise, 0.0};
  r.h = {g2 * (base + asym_h), noise, 0.0};
  r.l.ratio = r.l.S_ig / r.l.N_oise;
  r.h.ratio = r.h.S_ig / r.h.N_oise;
  switch (m.scheme) {
    case Scheme::Green:
      r.primary = {0.5 * (r.l.S_ig + r.h.S_ig), noise, 0.0};
      r.primary.ratio = r.primary.S_ig / noise;
      break;
    case Scheme::Blue: r.primary = r.l; break;
    default: r.primary = r.h; break;
  }
  return r;
}

SignalNoise signal_noise(const DerivedParams& d, const DriveParams& drive, double E_c,
                         double n_det, double delta_omega) {
  const auto ba = back_action(d, drive, E_c);
  const double Ge = drive.scheme == Scheme::Green ? d.circuit.Gamma_m : ba.Gamma_eff;
  if (!(delta_omega >= Ge))
    throw Error(Errc::InvalidParameter, "integration bandwidth must cover the peak (>= Gamma_eff)");
  const auto m = readout_model(d, drive, n_det, delta_omega);
  return signal_noise(m, E_c / (hbar * d.omega_c));
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::pow(10.0, n > 1 ? a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1) : a);
  return v;
}

std::vector<SclScanPoint> scl_scan(const ReadoutModel& m, const std::vector<double>& n_c) {
  std::vector<SclScanPoint> out;
  out.reserve(n_c.size());
  for (double n : n_c) {
    const auto sn = signal_noise(m, n);
    out.push_back({n, 1.0 / sn.primary.ratio, sn.primary.S_ig, sn.primary.N_oise});
  }
  return out;
}

SclOptimum scl_scan_optimum(const ReadoutModel& m, double n_lo, double n_hi) {
  auto f = [&m](double log_n) { return signal_noise(m, std::pow(10.0, log_n)).primary.ratio; };
  // Coarse bracket, then golden-section refinement on log10(n_c).
  const std::size_t N = 400;
  const double a0 = std::log10(n_lo);
  const double b0 = std::log10(n_hi);
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = a0 + (b0 - a0) * static_cast<double>(i) / static_cast<double>(N - 1);
    const double v = f(x);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (b0 - a0) / static_cast<double>(N - 1);
  double a = a0 + step * (static_cast<double>(best) - 1.0);
  double b = a0 + step * (static_cast<double>(best) + 1.0);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  SclOptimum o;
  o.n_c_star = std::pow(10.0, 0.5 * (a + b));
  o.ratio_star = signal_noise(m, o.n_c_star).primary.ratio;
  o.closed_form = false;
  return o;
}

SclOptimum scl_optimum(const ReadoutModel& m) {
  if (m.scheme != Scheme::Green)
    throw Error(Errc::UnsupportedScheme, "the SCL optimum is derived for the green scheme");
  if (std::abs(m.n_ex_th - m.n_c_th) > 1e-12 * std::max(m.n_c_th, m.n_ex_th)) {
    auto o = scl_scan_optimum(m);
    o.assumption_violated = true;
    return o;
  }
  SclOptimum o;
  const double dw = m.delta_omega / m.Gamma_m;
  const double kr = m.kappa_t / m.kappa_ex;
  o.n_c_star = 1.0 / (4.0 * std::sqrt(pi)) * std::sqrt(dw) * std::sqrt(kr) *
               std::sqrt(m.n_det / m.n_c_th) * m.Gamma_m * m.Omega_m * m.Omega_m /
               (m.kappa_t * m.g0 * m.g0);
  o.ratio_star = m.n_m_th / std::sqrt(m.n_det * 2.0 * m.n_c_th) * std::sqrt(two_pi) *
                 std::sqrt(1.0 / kr) * std::sqrt(1.0 / dw);
  return o;
}

SclOptimum quantum_reference(double kappa_ex_over_kappa_t, double delta_omega_over_Gamma) {
  const auto m = readout_from_figures(1.0, kappa_ex_over_kappa_t, delta_omega_over_Gamma, 1.0,
                                      0.5, 0.5, 0.5);
  return scl_optimum(m);
}

}  // namespace optomech
