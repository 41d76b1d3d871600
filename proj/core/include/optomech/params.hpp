#pragma once

#include <complex>
#include <cstdint>

namespace optomech {

using cplx = std::complex<double>;

enum class TopologyKind { SinglePort, TwoPort, Bidirectional };

/// Port arrangement. C_c1/C_c2 are only meaningful for TwoPort; their sum must
/// equal CircuitParams::C_c.
struct Topology {
  TopologyKind kind = TopologyKind::SinglePort;
  double C_c1 = 0.0;
  double C_c2 = 0.0;

  static Topology single_port() { return {}; }
  static Topology bidirectional() { return {TopologyKind::Bidirectional, 0.0, 0.0}; }
  static Topology two_port(double c1, double c2) { return {TopologyKind::TwoPort, c1, c2}; }
};

const char* topology_name(TopologyKind kind) noexcept;

/// Lumped circuit, mechanical and thermal description. SI units, angular
/// frequencies in rad/s.
struct CircuitParams {
  double L = 0.0;        // H
  double C_c = 0.0;      // F, total coupling capacitance
  double C_k = 0.0;      // F
  double C_g0 = 0.0;     // F
  double dCg_dx = 0.0;   // F/m
  double R_in = 0.0;     // ohm
  double Z0 = 50.0;      // ohm
  Topology topology{};
  double m = 0.0;        // kg
  double Omega_m = 0.0;  // rad/s
  double Gamma_m = 0.0;  // rad/s
  double T_m = 0.0;      // K
  double T_in = 0.0;     // K
  double T_ex = 0.0;     // K
  double n_det = 1.0;
};

struct DerivedParams {
  double C_t = 0.0;
  double omega_c = 0.0;
  double R_ex = 0.0;
  double kappa_ex = 0.0;
  double kappa_in = 0.0;
  double kappa_t = 0.0;
  double kappa_1 = 0.0;  // two-port only, zero otherwise
  double kappa_2 = 0.0;
  double Q_in = 0.0;
  double Q_ex = 0.0;
  double Q_t = 0.0;
  double G = 0.0;        // rad/(s m), G = -d omega_c / dx
  double x_zpf = 0.0;    // m
  double g0 = 0.0;       // rad/s
  double T_c = 0.0;      // K
  double xbar2 = 0.0;    // m^2/J
  CircuitParams circuit{};
};

enum class Scheme { Red, Green, Blue, Custom };

const char* scheme_name(Scheme s) noexcept;

struct DriveParams {
  double V_p = 0.0;    // V, source amplitude
  double Delta = 0.0;  // rad/s, omega_p - omega_c
  Scheme scheme = Scheme::Green;

  /// Canonical detuning for Red/Green/Blue; Custom keeps `custom_delta`.
  static DriveParams make(Scheme s, double Omega_m, double V_p, double custom_delta = 0.0);
};

struct EffectiveCouplings {
  double kappa_drive = 0.0;
  double kappa_detect = 0.0;
  /// Impedance loading of the detection node: 1 for a Z0 load, 0.5 for the
  /// evanescent (two Z0 in parallel) arrangement.
  double output_prefactor = 1.0;
};

struct Populations {
  double n_c = 0.0;
  double n_c_th = 0.0;
  double n_ex_th = 0.0;
  double n_m_th = 0.0;
};

struct EnergyFlow {
  double P_in = 0.0;    // W
  double E_c = 0.0;     // J
  double P_pump = 0.0;  // W
};

/// Limits enforced by derive().
inline constexpr double weak_coupling_limit = 0.05;
inline constexpr double frequency_ratio_limit = 0.1;

DerivedParams derive(const CircuitParams& circuit);
EffectiveCouplings topology_map(const DerivedParams& derived);
Populations populations(const DerivedParams& derived, double E_c);
EnergyFlow energy_flow(const DerivedParams& derived, const DriveParams& drive);

/// Throws InvalidDrive when the scheme and detuning disagree.
void validate_drive(const DerivedParams& derived, const DriveParams& drive);

/// Pump susceptibility 1/(-i Delta + kappa_t/2).
cplx chi_pump(const DerivedParams& derived, double Delta);

/// Coupling capacitances that reproduce kappa_drive and kappa_detect through
/// kappa = (omega_c C)^2 Z0 / C_t. Equal to C_c for a single port.
double drive_capacitance(const DerivedParams& derived);
double detect_capacitance(const DerivedParams& derived);

/// Complex drive current amplitude I_p = i omega_c C_drive V_d with V_d = 2 V_p.
cplx drive_current(const DerivedParams& derived, const DriveParams& drive);

/// Deterministic intracavity flux amplitude (i/2)(I_p/(omega_c C_t)) chi_p.
cplx pump_amplitude(const DerivedParams& derived, const DriveParams& drive);

/// Source amplitude that stores energy E_c in the cavity at the given detuning.
double drive_for_energy(const DerivedParams& derived, double Delta, double E_c);

/// Cavity energy that yields a given g^2 (g^2 = G^2 xbar2 E_c).
double energy_for_g2(const DerivedParams& derived, double g2);

/// Target rates used to build a circuit; convenient for simulation studies.
struct RateDesign {
  double omega_c = 0.0;
  double kappa_ex = 0.0;
  double kappa_in = 0.0;
  double Z0 = 50.0;
  double C_t = 1e-12;
  double C_g0_fraction = 0.1;  // share of C_t held by the mobile element
  double G = 0.0;              // rad/(s m)
  TopologyKind topology = TopologyKind::SinglePort;
  double kappa_1_fraction = 0.5;  // TwoPort: kappa_1 / kappa_ex
  double m = 0.0;
  double Omega_m = 0.0;
  double Gamma_m = 0.0;
  double T_m = 0.0;
  double T_in = 0.0;
  double T_ex = 0.0;
  double n_det = 1.0;
};

/// Inverse of derive(): lumped elements realising the requested rates.
CircuitParams design_circuit(const RateDesign& d);

/// FNV-1a hash of every field, used to tag simulation output.
std::uint64_t params_hash(const CircuitParams& c);

}  // namespace optomech
