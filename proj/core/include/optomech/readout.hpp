#pragma once

#include <vector>

#include "optomech/params.hpp"

namespace optomech {

/// Dimension-carrying inputs of the signal/noise budget. Everything the
/// budget needs, so it can be built either from a circuit or directly from
/// dimensionless figures (e.g. Gamma_m Omega_m^2 / (kappa_t g0^2)).
struct ReadoutModel {
  Scheme scheme = Scheme::Green;
  double kappa_t = 0.0;
  double kappa_ex = 0.0;  // detection-side rate
  double Omega_m = 0.0;
  double Gamma_m = 0.0;
  double g0 = 0.0;
  double n_det = 1.0;
  double n_c_th = 0.0;
  double n_ex_th = 0.0;
  double n_m_th = 0.0;
  double delta_omega = 0.0;  // integration bandwidth, rad/s
  double Delta = 0.0;
};

/// Model from circuit parameters (the detection rate comes from topology_map).
ReadoutModel readout_model(const DerivedParams& d, const DriveParams& drive, double n_det,
                           double delta_omega);

/// Model from dimensionless figures. Rates are expressed in units of Omega_m
/// (Omega_m = 1), so kappa_t_over_Omega must be small for the resolved limit.
ReadoutModel readout_from_figures(double coupling_figure,  // Gamma_m Omega_m^2/(kappa_t g0^2)
                                  double kappa_ex_over_kappa_t, double delta_omega_over_Gamma,
                                  double n_det, double n_c_th, double n_ex_th, double n_m_th,
                                  double kappa_t_over_Omega = 1e-3,
                                  double Gamma_over_Omega = 1e-6);

struct SidebandBudget {
  double S_ig = 0.0;
  double N_oise = 0.0;
  double ratio = 0.0;
};

struct SignalNoise {
  SidebandBudget l;
  SidebandBudget h;
  /// Scheme-appropriate figure: green averages both sidebands (the
  /// asymmetry-free quantity), blue uses 'l', red uses 'h'.
  SidebandBudget primary;
  bool unstable = false;
};

/// Both sidebands share the prefactor hbar omega_c |chi_i|^2 kappa_ex, which is
/// dropped here; signal and noise are reported in units of
/// hbar omega_c |chi_i|^2 kappa_ex (rad^2/s^2).
SignalNoise signal_noise(const ReadoutModel& m, double n_c);

/// Circuit-level entry point: n_c from E_c, Gamma_eff from back-action.
SignalNoise signal_noise(const DerivedParams& d, const DriveParams& drive, double E_c,
                         double n_det, double delta_omega);

struct SclOptimum {
  double n_c_star = 0.0;
  double ratio_star = 0.0;
  bool closed_form = true;          // false when the numerical scan was used
  bool assumption_violated = false;  // n_ex_th != n_c_th
};

/// Closed-form optimum of the green-scheme ratio; falls back to a numerical
/// maximisation (flagged) when n_ex_th != n_c_th.
SclOptimum scl_optimum(const ReadoutModel& m);

/// Numerical maximum of signal_noise(m, n_c).primary.ratio over n_c.
SclOptimum scl_scan_optimum(const ReadoutModel& m, double n_lo = 1.0, double n_hi = 1e16);

struct SclScanPoint {
  double n_c = 0.0;
  double inverse_ratio = 0.0;
  double S_ig = 0.0;
  double N_oise = 0.0;
};
std::vector<SclScanPoint> scl_scan(const ReadoutModel& m, const std::vector<double>& n_c);

/// Log-spaced grid helper.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// Reference row at the quantum limit: n_det = 1, n_c_th = n_m_th = 1/2.
/// Reported only; never simulated.
SclOptimum quantum_reference(double kappa_ex_over_kappa_t = 1.0,
                             double delta_omega_over_Gamma = 6.0);

}  // namespace optomech
