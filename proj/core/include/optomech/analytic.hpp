#pragma once

#include <optional>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

struct Susceptibilities {
  cplx chi_p;
  cplx chi_l;
  cplx chi_h;
};

/// chi_n = 1 / (-i (Delta + n Omega_m) + kappa_t / 2), n = 0, -1, +1.
Susceptibilities susceptibilities(double Delta, double Omega_m, double kappa_t);

/// Cavity susceptibility of component n seen at envelope frequency nu
/// (time dependence exp(-i nu t)).
cplx chi_component(double Delta, double Omega_m, double kappa_t, int n, double nu);

struct BackActionResult {
  cplx Sigma;                   // kg rad/s^2 (force per unit complex amplitude)
  double g2 = 0.0;              // rad^2/s^2
  double delta_Omega_m = 0.0;   // rad/s
  double Gamma_opt = 0.0;       // rad/s
  double Gamma_opt_prime = 0.0; // rad/s
  double S_L0 = 0.0;            // N^2 s, rotating frame
  double S_dF0 = 0.0;           // N^2 s, rotating frame
  double T_eff = 0.0;           // K
  double Gamma_eff = 0.0;       // rad/s
  bool unstable = false;
};

BackActionResult back_action(const DerivedParams& d, const DriveParams& drive, double E_c);

/// Self-energy with the cavity susceptibilities evaluated at envelope
/// frequency nu; nu = 0 is the quasi-static value used by back_action.
cplx self_energy(const DerivedParams& d, double Delta, double E_c, double nu);

/// chi_m(nu) = 1 / (2 m Omega_m (-nu - i Gamma_m/2) + Sigma), static Sigma.
cplx chi_mech(const DerivedParams& d, const BackActionResult& ba, double nu);

/// Rotating frame: S_x0(nu) = |chi_m(nu)|^2 (S_L0 + S_dF0), grid within
/// +-5 Omega_m of 0. Lab frame: both peaks near +-Omega_m with the quarter
/// (single-sided rotation) force level, grid within 6 Omega_m of 0.
SpectrumResult displacement_psd(const DerivedParams& d, const DriveParams& drive, double E_c,
                                const std::vector<double>& omega, Frame frame = Frame::Rotating);

/// Measured output PSD [W/(rad/s)] on an absolute angular-frequency grid.
/// Components: background, cavity, sideband_l, sideband_h. The pump is a
/// discrete line (pump_line_power), never rasterised. Door functions are
/// rectangles of width Omega_m centred on omega_p + n Omega_m, n in {-1,0,1};
/// outside them only the background remains.
///
/// E_c is authoritative for the drive strength; `drive` supplies the detuning.
/// Cavity filters keep their full frequency dependence inside each door.
SpectrumResult output_psd(const DerivedParams& d, const DriveParams& drive, double E_c,
                          const std::vector<double>& omega);

/// Observed displacement spectra behind each sideband, lab frame, at envelope
/// offsets nu from omega_l (S_minus) and omega_h (S_plus). Includes the
/// apparent force from noise cross-correlations.
struct SidebandDisplacement {
  std::vector<double> nu;
  std::vector<double> S_minus;
  std::vector<double> S_plus;
};
SidebandDisplacement sideband_displacement_psd(const DerivedParams& d, const DriveParams& drive,
                                               double E_c, const std::vector<double>& nu);

struct ApparentForce {
  std::optional<double> S_dF_ex_l;  // N^2 s, lab frame
  std::optional<double> S_dF_ex_h;
};

/// Closed forms at the three canonical detunings (resolved-sideband limit).
/// Blue reports only the 'l' sideband and Red only 'h'. Custom is rejected.
ApparentForce sideband_asymmetry(const DerivedParams& d, const DriveParams& drive, double E_c);

/// Apparent force extracted from the full linear response at envelope
/// offset nu (lab units), valid at any detuning.
struct ApparentForceGeneral {
  double S_dF_ex_l = 0.0;
  double S_dF_ex_h = 0.0;
};
ApparentForceGeneral apparent_force_psd(const DerivedParams& d, const DriveParams& drive,
                                        double E_c, double nu);

/// S_imp = kappa_t^2 n_det / (16 G^2 n_c kappa_ex) (1 + 4 omega^2 / kappa_t^2).
double imprecision_psd(const DerivedParams& d, double n_c, double n_det, double omega);

/// Green-scheme product of S_imp at omega = Omega_m with the lab-frame
/// back-action force PSD S_dF0/4.
double heisenberg_product(const DerivedParams& d, const DriveParams& drive, double E_c,
                          double n_det);

/// Back-action quantities on a detuning grid at fixed cavity energy.
struct DetuningSweepPoint {
  double Delta = 0.0;
  double delta_Omega_m = 0.0;
  double Gamma_opt = 0.0;
  double Gamma_opt_prime = 0.0;
  double T_eff = 0.0;
  bool unstable = false;
};
std::vector<DetuningSweepPoint> detuning_sweep(const DerivedParams& d, double E_c,
                                               const std::vector<double>& Delta);

}  // namespace optomech
