#include "optomech/params.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveElement: return "NonPositiveElement";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::WeakCouplingViolated: return "WeakCouplingViolated";
    case Errc::FrequencyRatioViolated: return "FrequencyRatioViolated";
    case Errc::InconsistentTopology: return "InconsistentTopology";
    case Errc::InvalidDrive: return "InvalidDrive";
    case Errc::UnsupportedScheme: return "UnsupportedScheme";
    case Errc::ZeroDrive: return "ZeroDrive";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::InvalidSimConfig: return "InvalidSimConfig";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::TooShort: return "TooShort";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::AmbiguousPeak: return "AmbiguousPeak";
    case Errc::OverlapError: return "OverlapError";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

const char* topology_name(TopologyKind kind) noexcept {
  switch (kind) {
    case TopologyKind::SinglePort: return "single_port";
    case TopologyKind::TwoPort: return "two_port";
    case TopologyKind::Bidirectional: return "bidirectional";
  }
  return "unknown";
}

const char* scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::Red: return "red";
    case Scheme::Green: return "green";
    case Scheme::Blue: return "blue";
    case Scheme::Custom: return "custom";
  }
  return "unknown";
}

DriveParams DriveParams::make(Scheme s, double Omega_m, double V_p, double custom_delta) {
  DriveParams d;
  d.V_p = V_p;
  d.scheme = s;
  switch (s) {
    case Scheme::Red: d.Delta = -Omega_m; break;
    case Scheme::Green: d.Delta = 0.0; break;
    case Scheme::Blue: d.Delta = Omega_m; break;
    case Scheme::Custom: d.Delta = custom_delta; break;
  }
  return d;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be strictly positive and finite (got " << v << ")";
    throw Error(Errc::NonPositiveElement, os.str());
  }
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be >= 0 and finite (got " << v << ")";
    throw Error(Errc::InvalidParameter, os.str());
  }
}

double port_rate(double C, double omega_c, double Z0, double C_t) {
  const double wc = omega_c * C;
  return wc * wc * Z0 / C_t;
}

}  // namespace

DerivedParams derive(const CircuitParams& c) {
  require_positive(c.L, "L");
  require_positive(c.C_c, "C_c");
  require_positive(c.C_k, "C_k");
  require_positive(c.C_g0, "C_g0");
  require_positive(c.R_in, "R_in");
  require_positive(c.Z0, "Z0");
  require_positive(c.m, "m");
  require_positive(c.Omega_m, "Omega_m");
  require_positive(c.Gamma_m, "Gamma_m");
  require_non_negative(c.T_m, "T_m");
  require_non_negative(c.T_in, "T_in");
  require_non_negative(c.T_ex, "T_ex");
  require_non_negative(c.n_det, "n_det");
  if (!std::isfinite(c.dCg_dx)) throw Error(Errc::InvalidParameter, "dCg_dx must be finite");

  if (c.topology.kind == TopologyKind::TwoPort) {
    require_positive(c.topology.C_c1, "C_c1");
    require_positive(c.topology.C_c2, "C_c2");
    const double sum = c.topology.C_c1 + c.topology.C_c2;
    if (std::abs(sum - c.C_c) > 1e-9 * c.C_c) {
      std::ostringstream os;
      os << "two-port C_c1 + C_c2 = " << sum << " F differs from C_c = " << c.C_c << " F";
      throw Error(Errc::InconsistentTopology, os.str());
    }
  }

  DerivedParams d;
  d.circuit = c;
  d.C_t = c.C_c + c.C_k + c.C_g0;
  d.omega_c = 1.0 / std::sqrt(c.L * d.C_t);

  const double coupling = c.C_c * d.omega_c * c.Z0;
  if (!(coupling < weak_coupling_limit)) {
    std::ostringstream os;
    os << "C_c omega_c Z0 = " << coupling << " is not below " << weak_coupling_limit;
    throw Error(Errc::WeakCouplingViolated, os.str());
  }
  const double ratio = c.Omega_m / d.omega_c;
  if (!(ratio < frequency_ratio_limit)) {
    std::ostringstream os;
    os << "Omega_m / omega_c = " << ratio << " is not below " << frequency_ratio_limit;
    throw Error(Errc::FrequencyRatioViolated, os.str());
  }

  if (c.topology.kind == TopologyKind::TwoPort) {
    d.kappa_1 = port_rate(c.topology.C_c1, d.omega_c, c.Z0, d.C_t);
    d.kappa_2 = port_rate(c.topology.C_c2, d.omega_c, c.Z0, d.C_t);
    d.kappa_ex = d.kappa_1 + d.kappa_2;
    d.R_ex = 1.0 / (d.kappa_ex * d.C_t);
  } else {
    const double wc = d.omega_c * c.C_c;
    d.R_ex = 1.0 / (wc * wc * c.Z0);
    d.kappa_ex = 1.0 / (d.R_ex * d.C_t);
  }
  d.kappa_in = 1.0 / (c.R_in * d.C_t);
  d.kappa_t = d.kappa_ex + d.kappa_in;
  d.Q_in = d.omega_c / d.kappa_in;
  d.Q_ex = d.omega_c / d.kappa_ex;
  d.Q_t = d.omega_c / d.kappa_t;

  d.G = d.omega_c / (2.0 * d.C_t) * c.dCg_dx;
  d.xbar2 = 1.0 / (d.omega_c * 2.0 * c.m * c.Omega_m);
  d.x_zpf = std::sqrt(hbar * d.omega_c * d.xbar2);
  d.g0 = d.G * d.x_zpf;
  d.T_c = (d.kappa_in * c.T_in + d.kappa_ex * c.T_ex) / d.kappa_t;
  return d;
}

EffectiveCouplings topology_map(const DerivedParams& d) {
  switch (d.circuit.topology.kind) {
    case TopologyKind::SinglePort: return {d.kappa_ex, d.kappa_ex, 1.0};
    case TopologyKind::TwoPort: return {d.kappa_1, d.kappa_2, 1.0};
    case TopologyKind::Bidirectional: return {0.5 * d.kappa_ex, 0.5 * d.kappa_ex, 0.5};
  }
  return {};
}

Populations populations(const DerivedParams& d, double E_c) {
  if (!(E_c >= 0.0)) throw Error(Errc::InvalidParameter, "E_c must be >= 0");
  const auto& c = d.circuit;
  Populations p;
  p.n_c = E_c / (hbar * d.omega_c);
  p.n_c_th = k_B * d.T_c / (hbar * d.omega_c);
  p.n_ex_th = k_B * c.T_ex / (hbar * d.omega_c);
  p.n_m_th = k_B * c.T_m / (hbar * c.Omega_m);
  return p;
}

void validate_drive(const DerivedParams& d, const DriveParams& drive) {
  if (!std::isfinite(drive.V_p) || !std::isfinite(drive.Delta))
    throw Error(Errc::InvalidDrive, "drive amplitude and detuning must be finite");
  const double W = d.circuit.Omega_m;
  double expected = drive.Delta;
  switch (drive.scheme) {
    case Scheme::Red: expected = -W; break;
    case Scheme::Green: expected = 0.0; break;
    case Scheme::Blue: expected = W; break;
    case Scheme::Custom: return;
  }
  if (std::abs(drive.Delta - expected) > 1e-12 * W) {
    std::ostringstream os;
    os << scheme_name(drive.scheme) << " scheme requires Delta = " << expected
       << " rad/s (got " << drive.Delta << ")";
    throw Error(Errc::InvalidDrive, os.str());
  }
}

cplx chi_pump(const DerivedParams& d, double Delta) {
  return 1.0 / cplx(0.5 * d.kappa_t, -Delta);
}

double drive_capacitance(const DerivedParams& d) {
  return std::sqrt(topology_map(d).kappa_drive * d.C_t / d.circuit.Z0) / d.omega_c;
}

double detect_capacitance(const DerivedParams& d) {
  return std::sqrt(topology_map(d).kappa_detect * d.C_t / d.circuit.Z0) / d.omega_c;
}

EnergyFlow energy_flow(const DerivedParams& d, const DriveParams& drive) {
  validate_drive(d, drive);
  const auto eff = topology_map(d);
  EnergyFlow f;
  f.P_in = drive.V_p * drive.V_p / (2.0 * d.circuit.Z0);
  f.E_c = f.P_in * eff.kappa_drive * std::norm(chi_pump(d, drive.Delta));
  f.P_pump = f.E_c * eff.kappa_detect;
  return f;
}

cplx drive_current(const DerivedParams& d, const DriveParams& drive) {
  const double V_d = 2.0 * drive.V_p;
  return cplx(0.0, d.omega_c * drive_capacitance(d) * V_d);
}

cplx pump_amplitude(const DerivedParams& d, const DriveParams& drive) {
  const cplx I_p = drive_current(d, drive);
  return cplx(0.0, 0.5) * (I_p / (d.omega_c * d.C_t)) * chi_pump(d, drive.Delta);
}

double drive_for_energy(const DerivedParams& d, double Delta, double E_c) {
  if (!(E_c >= 0.0)) throw Error(Errc::InvalidParameter, "E_c must be >= 0");
  const double k = topology_map(d).kappa_drive;
  return std::sqrt(2.0 * d.circuit.Z0 * E_c / (k * std::norm(chi_pump(d, Delta))));
}

double energy_for_g2(const DerivedParams& d, double g2) {
  if (d.G == 0.0) throw Error(Errc::InvalidParameter, "G = 0: no drive reaches a finite g");
  if (!(g2 >= 0.0)) throw Error(Errc::InvalidParameter, "g^2 must be >= 0");
  return g2 / (d.G * d.G * d.xbar2);
}

CircuitParams design_circuit(const RateDesign& r) {
  require_positive(r.omega_c, "omega_c");
  require_positive(r.kappa_ex, "kappa_ex");
  require_positive(r.kappa_in, "kappa_in");
  require_positive(r.C_t, "C_t");
  require_positive(r.Z0, "Z0");

  CircuitParams c;
  c.L = 1.0 / (r.omega_c * r.omega_c * r.C_t);
  c.Z0 = r.Z0;
  auto cap_for = [&](double kappa) { return std::sqrt(kappa * r.C_t / r.Z0) / r.omega_c; };
  if (r.topology == TopologyKind::TwoPort) {
    const double f = r.kappa_1_fraction;
    if (!(f > 0.0 && f < 1.0))
      throw Error(Errc::InvalidParameter, "kappa_1_fraction must lie in (0, 1)");
    const double c1 = cap_for(f * r.kappa_ex);
    const double c2 = cap_for((1.0 - f) * r.kappa_ex);
    c.topology = Topology::two_port(c1, c2);
    c.C_c = c1 + c2;
  } else {
    c.C_c = cap_for(r.kappa_ex);
    c.topology.kind = r.topology;
  }
  c.C_g0 = r.C_g0_fraction * r.C_t;
  c.C_k = r.C_t - c.C_c - c.C_g0;
  if (!(c.C_k > 0.0))
    throw Error(Errc::NonPositiveElement, "requested rates leave no room for C_k; raise C_t");
  c.R_in = 1.0 / (r.kappa_in * r.C_t);
  c.dCg_dx = 2.0 * r.C_t * r.G / r.omega_c;
  c.m = r.m;
  c.Omega_m = r.Omega_m;
  c.Gamma_m = r.Gamma_m;
  c.T_m = r.T_m;
  c.T_in = r.T_in;
  c.T_ex = r.T_ex;
  c.n_det = r.n_det;
  return c;
}

std::uint64_t params_hash(const CircuitParams& c) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  auto mixd = [&mix](double v) { mix(std::bit_cast<std::uint64_t>(v)); };
  mixd(c.L);
  mixd(c.C_c);
  mixd(c.C_k);
  mixd(c.C_g0);
  mixd(c.dCg_dx);
  mixd(c.R_in);
  mixd(c.Z0);
  mix(static_cast<std::uint64_t>(c.topology.kind));
  mixd(c.topology.C_c1);
  mixd(c.topology.C_c2);
  mixd(c.m);
  mixd(c.Omega_m);
  mixd(c.Gamma_m);
  mixd(c.T_m);
  mixd(c.T_in);
  mixd(c.T_ex);
  mixd(c.n_det);
  return h;
}

}  // namespace optomech
