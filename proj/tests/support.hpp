#pragma once

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/params.hpp"

namespace optomech::testing {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// Superconducting-style 5 GHz circuit with a 5 MHz drum.
inline CircuitParams ghz_circuit() {
  CircuitParams c;
  c.C_c = 2e-15;
  c.C_k = 3e-13;
  c.C_g0 = 1e-13;
  const double wc = two_pi * 5e9;
  c.L = 1.0 / (wc * wc * (c.C_c + c.C_k + c.C_g0));
  c.R_in = 2e6;
  c.Z0 = 50.0;
  c.dCg_dx = 1e-9;
  c.m = 1e-15;
  c.Omega_m = two_pi * 5e6;
  c.Gamma_m = two_pi * 50.0;
  c.T_m = 0.02;
  c.T_in = 0.02;
  c.T_ex = 0.02;
  return c;
}

/// Desk-scale circuit used for simulation: omega_c / Omega_m = 100.
inline RateDesign desk_design(double kappa_over_Omega = 0.1, double g_coupling = 1e12) {
  RateDesign r;
  r.Omega_m = two_pi * 1e4;
  r.omega_c = two_pi * 1e6;
  r.kappa_ex = 0.5 * kappa_over_Omega * r.Omega_m;
  r.kappa_in = 0.5 * kappa_over_Omega * r.Omega_m;
  r.C_t = 1e-10;
  r.G = g_coupling;
  r.m = 1e-12;
  r.Gamma_m = 0.01 * r.Omega_m;
  r.T_m = 0.1;
  r.T_in = 0.3;
  r.T_ex = 0.1;
  return r;
}

}  // namespace optomech::testing
