#pragma once

#include "optomech/params.hpp"

namespace optomech {

/// Noise sources and output transduction shared by the closed-form output
/// spectrum and the time-domain simulator.
///
/// Each resistor injects a complex-envelope current noise of PSD 8 k_B T / R
/// into every spectral component. The detected envelope of component n is
///   V_n = -a mu_n + i beta dI_det,n + xi_n
/// where dI_det is the noise of the detection-port resistor and xi_n is an
/// independent detector-side term of PSD 2 Z0 k_B T_ex. The measured PSD is
/// S_V / (2 Z0) folded to positive frequency.
struct PortModel {
  double C_det = 0.0;
  double a_out = 0.0;    // omega_c^2 C_det Z0
  double beta = 0.0;     // 1 / (2 omega_c C_det)
  double S_I_in = 0.0;   // internal resistor, T_in
  double S_I_det = 0.0;  // detection port resistor, T_ex
  double S_I_oth = 0.0;  // remaining external loading, T_ex
  double S_xi = 0.0;
  double S_L0 = 0.0;     // rotating-frame Langevin force, 8 k_B T_m m Gamma_m
  double Z0 = 0.0;
  double omega_c = 0.0;
  double C_t = 0.0;

  double S_I_total() const { return S_I_in + S_I_det + S_I_oth; }
};

PortModel port_model(const DerivedParams& d);

}  // namespace optomech
