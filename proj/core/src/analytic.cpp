#include "optomech/analytic.hpp"

#include <cmath>
#include <sstream>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/port_model.hpp"

namespace optomech {

Susceptibilities susceptibilities(double Delta, double Omega_m, double kappa_t) {
  if (!(kappa_t > 0.0)) throw Error(Errc::InvalidParameter, "kappa_t must be > 0");
  const double h = 0.5 * kappa_t;
  return {1.0 / cplx(h, -Delta), 1.0 / cplx(h, -(Delta - Omega_m)),
          1.0 / cplx(h, -(Delta + Omega_m))};
}

cplx chi_component(double Delta, double Omega_m, double kappa_t, int n, double nu) {
  return 1.0 / cplx(0.5 * kappa_t, -(Delta + n * Omega_m + nu));
}

PortModel port_model(const DerivedParams& d) {
  const auto& c = d.circuit;
  const auto eff = topology_map(d);
  PortModel p;
  p.C_det = detect_capacitance(d);
  p.a_out = d.omega_c * d.omega_c * p.C_det * c.Z0;
  p.beta = 1.0 / (2.0 * d.omega_c * p.C_det);
  p.S_I_in = 8.0 * k_B * c.T_in * d.kappa_in * d.C_t;
  p.S_I_det = 8.0 * k_B * c.T_ex * eff.kappa_detect * d.C_t;
  p.S_I_oth = 8.0 * k_B * c.T_ex * (d.kappa_ex - eff.kappa_detect) * d.C_t;
  p.S_xi = 2.0 * c.Z0 * k_B * c.T_ex;
  p.S_L0 = 8.0 * k_B * c.T_m * c.m * c.Gamma_m;
  p.Z0 = c.Z0;
  p.omega_c = d.omega_c;
  p.C_t = d.C_t;
  return p;
}

BackActionResult back_action(const DerivedParams& d, const DriveParams& drive, double E_c) {
  validate_drive(d, drive);
  if (!(E_c >= 0.0) || !std::isfinite(E_c))
    throw Error(Errc::InvalidParameter, "E_c must be finite and >= 0");
  const auto& c = d.circuit;
  const double W = c.Omega_m;
  const double k = d.kappa_t;
  const double Dh = (drive.Delta + W) * (drive.Delta + W) + 0.25 * k * k;
  const double Dl = (drive.Delta - W) * (drive.Delta - W) + 0.25 * k * k;

  BackActionResult r;
  r.g2 = d.G * d.G * d.xbar2 * E_c;
  r.Sigma = self_energy(d, drive.Delta, E_c, 0.0);
  r.delta_Omega_m = r.g2 * ((drive.Delta + W) / Dh + (drive.Delta - W) / Dl);
  r.Gamma_opt = r.g2 * k * (1.0 / Dh - 1.0 / Dl);
  r.Gamma_opt_prime = r.g2 * (W / d.omega_c) * k * (1.0 / Dh + 1.0 / Dl);
  r.S_L0 = 8.0 * k_B * c.T_m * c.m * c.Gamma_m;
  // R_t S_dIn / 2 with S_dIn = 8 k_B T_c / R_t.
  r.S_dF0 = d.G * d.G / (d.omega_c * d.omega_c) * E_c * (4.0 * k_B * d.T_c) * k *
            (1.0 / Dh + 1.0 / Dl);
  r.Gamma_eff = c.Gamma_m + r.Gamma_opt;
  r.T_eff = (c.T_m * c.Gamma_m + d.T_c * r.Gamma_opt_prime) / r.Gamma_eff;
  r.unstable = !(r.Gamma_eff > 0.0);
  return r;
}

cplx self_energy(const DerivedParams& d, double Delta, double E_c, double nu) {
  const double W = d.circuit.Omega_m;
  const cplx chi_h = chi_component(Delta, W, d.kappa_t, +1, nu);
  const cplx chi_l_m = chi_component(Delta, W, d.kappa_t, -1, -nu);
  return cplx(0.0, -1.0) * (d.G * d.G / d.omega_c) * E_c * (chi_h - std::conj(chi_l_m));
}

cplx chi_mech(const DerivedParams& d, const BackActionResult& ba, double nu) {
  const auto& c = d.circuit;
  return 1.0 / (2.0 * c.m * c.Omega_m * cplx(-nu, -0.5 * c.Gamma_m) + ba.Sigma);
}

namespace {

void check_grid(const std::vector<double>& omega) {
  if (omega.empty()) throw Error(Errc::DomainViolation, "empty frequency grid");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i])) throw Error(Errc::DomainViolation, "non-finite grid point");
    if (i > 0 && !(omega[i] > omega[i - 1]))
      throw Error(Errc::DomainViolation, "frequency grid must be strictly increasing");
  }
}

// Linear response of the three-component model at envelope frequency nu.
struct ResponseContext {
  const DerivedParams& d;
  PortModel port;
  double Delta;
  double E_c;
  double mu_p;  // |mu_p|; only |mu_p|^2 enters
  double kappa_detect;
  double g2;

  ResponseContext(const DerivedParams& dd, double Delta_, double E_c_)
      : d(dd), port(port_model(dd)), Delta(Delta_), E_c(E_c_) {
    mu_p = std::sqrt(2.0 * E_c / (d.C_t * d.omega_c * d.omega_c));
    kappa_detect = topology_map(d).kappa_detect;
    g2 = d.G * d.G * d.xbar2 * E_c;
  }

  cplx chi(int n, double nu) const {
    return chi_component(Delta, d.circuit.Omega_m, d.kappa_t, n, nu);
  }

  // Mechanical susceptibility with the self-energy at frequency nu.
  cplx chi_m(double nu) const {
    const auto& c = d.circuit;
    return 1.0 / (2.0 * c.m * c.Omega_m * cplx(-nu, -0.5 * c.Gamma_m) +
                  self_energy(d, Delta, E_c, nu));
  }

  double S_tot() const { return port.S_I_total(); }

  // Envelope PSD (V^2 s) pieces of component n at nu: {background, cavity, sideband}.
  struct Parts {
    double background = 0.0;
    double cavity = 0.0;
    double sideband = 0.0;
  };

  Parts parts(int n, double nu) const {
    const double wC = d.omega_c * d.C_t;
    const cplx i(0.0, 1.0);
    const cplx A = -port.a_out * 0.5 * i * chi(n, nu);
    const cplx direct = A / wC;          // cavity path of a current source
    const cplx coherent = i * port.beta;  // detection-port resistor seen at the output

    Parts p;
    p.background = port.S_xi + port.beta * port.beta * port.S_I_det;
    const double cav_total = std::norm(direct) * (port.S_I_in + port.S_I_oth) +
                             std::norm(direct + coherent) * port.S_I_det;
    p.cavity = cav_total - port.beta * port.beta * port.S_I_det;
    if (n == 0 || g2 == 0.0) return p;

    const double G = d.G;
    cplx K, u, v;
    if (n == -1) {
      // V_l(nu) couples to conj(x0(-nu)).
      K = G * mu_p * std::conj(chi_m(-nu));
      u = K * (0.5 * i * G * mu_p) * chi(-1, nu);
      v = K * (-0.5 * i * G * mu_p) * std::conj(chi(+1, -nu));
    } else {
      K = G * mu_p * chi_m(nu);
      u = K * (0.5 * i * G * mu_p) * chi(+1, nu);
      v = K * (-0.5 * i * G * mu_p) * std::conj(chi(-1, -nu));
    }
    const cplx Au = A * u;
    p.sideband = S_tot() * (std::norm(Au) + 2.0 * std::real(Au * std::conj(direct))) +
                 2.0 * port.S_I_det * std::real(Au * std::conj(coherent)) +
                 S_tot() * std::norm(A * v) + port.S_L0 * std::norm(A * K);
    return p;
  }

  // Observed lab-frame displacement PSD behind sideband n (-1 or +1).
  double observed_x(int n, double nu) const {
    if (g2 == 0.0) return 0.25 * std::norm(chi_m(n == -1 ? -nu : nu)) * port.S_L0;
    const double sb = parts(n, nu).sideband / (2.0 * port.Z0);
    return sb * d.xbar2 / (kappa_detect * g2 * std::norm(chi(n, nu)));
  }

  // Rotating-frame back-action force PSD acting on x0 at frequency nu.
  double S_dF(double nu) const {
    const double f = 0.25 * d.G * d.G * mu_p * mu_p;
    return f * (std::norm(chi(+1, nu)) + std::norm(chi(-1, -nu))) * S_tot();
  }
};

}  // namespace

SpectrumResult displacement_psd(const DerivedParams& d, const DriveParams& drive, double E_c,
                                const std::vector<double>& omega, Frame frame) {
  check_grid(omega);
  const double W = d.circuit.Omega_m;
  const double limit = (frame == Frame::Rotating ? 5.0 : 6.0) * W * (1.0 + 1e-12);
  if (std::abs(omega.front()) > limit || std::abs(omega.back()) > limit) {
    std::ostringstream os;
    os << "grid must stay within " << (frame == Frame::Rotating ? 5 : 6)
       << " Omega_m of zero for this frame";
    throw Error(Errc::DomainViolation, os.str());
  }
  const auto ba = back_action(d, drive, E_c);
  const double S_force = ba.S_L0 + ba.S_dF0;

  SpectrumResult s;
  s.kind = SpectrumKind::Displacement;
  s.unit = "m^2 s";
  s.omega = omega;
  s.values.resize(omega.size());
  s.unstable = ba.unstable;
  if (frame == Frame::Rotating) {
    for (std::size_t i = 0; i < omega.size(); ++i)
      s.values[i] = std::norm(chi_mech(d, ba, omega[i])) * S_force;
  } else {
    SpectrumComponent minus{"S_minus", std::vector<double>(omega.size())};
    SpectrumComponent plus{"S_plus", std::vector<double>(omega.size())};
    for (std::size_t i = 0; i < omega.size(); ++i) {
      plus.values[i] = 0.25 * std::norm(chi_mech(d, ba, omega[i] - W)) * S_force;
      minus.values[i] = 0.25 * std::norm(chi_mech(d, ba, -omega[i] - W)) * S_force;
      s.values[i] = plus.values[i] + minus.values[i];
    }
    s.components.push_back(std::move(minus));
    s.components.push_back(std::move(plus));
  }
  return s;
}

SpectrumResult output_psd(const DerivedParams& d, const DriveParams& drive, double E_c,
                          const std::vector<double>& omega) {
  check_grid(omega);
  validate_drive(d, drive);
  if (!(E_c >= 0.0)) throw Error(Errc::InvalidParameter, "E_c must be >= 0");
  const ResponseContext ctx(d, drive.Delta, E_c);
  const double W = d.circuit.Omega_m;
  const double omega_p = d.omega_c + drive.Delta;
  const double to_psd = 1.0 / (2.0 * ctx.port.Z0);

  SpectrumResult s;
  s.kind = SpectrumKind::OutputPSD;
  s.unit = "W/(rad/s)";
  s.omega = omega;
  s.values.resize(omega.size());
  s.pump_line_omega = omega_p;
  s.pump_line_power = E_c * ctx.kappa_detect;
  s.overlap_warning = d.kappa_t / W > 0.5;
  s.unstable = back_action(d, drive, E_c).unstable;

  SpectrumComponent bg{"background", std::vector<double>(omega.size())};
  SpectrumComponent cav{"cavity", std::vector<double>(omega.size(), 0.0)};
  SpectrumComponent sl{"sideband_l", std::vector<double>(omega.size(), 0.0)};
  SpectrumComponent sh{"sideband_h", std::vector<double>(omega.size(), 0.0)};
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double off = omega[i] - omega_p;
    const long n = std::lround(off / W);
    if (n < -1 || n > 1) {
      bg.values[i] = (ctx.port.S_xi + ctx.port.beta * ctx.port.beta * ctx.port.S_I_det) * to_psd;
    } else {
      const double nu = off - static_cast<double>(n) * W;
      const auto p = ctx.parts(static_cast<int>(n), nu);
      bg.values[i] = p.background * to_psd;
      cav.values[i] = p.cavity * to_psd;
      if (n == -1) sl.values[i] = p.sideband * to_psd;
      if (n == +1) sh.values[i] = p.sideband * to_psd;
    }
    s.values[i] = bg.values[i] + cav.values[i] + sl.values[i] + sh.values[i];
  }
  s.components = {std::move(bg), std::move(cav), std::move(sl), std::move(sh)};
  return s;
}

SidebandDisplacement sideband_displacement_psd(const DerivedParams& d, const DriveParams& drive,
                                               double E_c, const std::vector<double>& nu) {
  validate_drive(d, drive);
  const ResponseContext ctx(d, drive.Delta, E_c);
  SidebandDisplacement r;
  r.nu = nu;
  r.S_minus.reserve(nu.size());
  r.S_plus.reserve(nu.size());
  for (double v : nu) {
    r.S_minus.push_back(ctx.observed_x(-1, v));
    r.S_plus.push_back(ctx.observed_x(+1, v));
  }
  return r;
}

ApparentForce sideband_asymmetry(const DerivedParams& d, const DriveParams& drive, double E_c) {
  validate_drive(d, drive);
  const auto& c = d.circuit;
  const double ratio = c.Omega_m / d.omega_c;
  ApparentForce f;
  switch (drive.scheme) {
    case Scheme::Blue: {
      const double Ge = back_action(d, drive, E_c).Gamma_eff;
      f.S_dF_ex_l = 2.0 * c.m * Ge * k_B * (2.0 * d.T_c - c.T_ex) * ratio;
      break;
    }
    case Scheme::Red: {
      const double Ge = back_action(d, drive, E_c).Gamma_eff;
      f.S_dF_ex_h = 2.0 * c.m * Ge * k_B * (c.T_ex - 2.0 * d.T_c) * ratio;
      break;
    }
    case Scheme::Green:
      f.S_dF_ex_l = 2.0 * c.m * c.Gamma_m * k_B * c.T_ex * ratio;
      f.S_dF_ex_h = -*f.S_dF_ex_l;
      break;
    case Scheme::Custom:
      throw Error(Errc::UnsupportedScheme,
                  "closed-form apparent forces exist only at Delta = 0, +-Omega_m");
  }
  return f;
}

ApparentForceGeneral apparent_force_psd(const DerivedParams& d, const DriveParams& drive,
                                        double E_c, double nu) {
  validate_drive(d, drive);
  const ResponseContext ctx(d, drive.Delta, E_c);
  ApparentForceGeneral f;
  f.S_dF_ex_l = ctx.observed_x(-1, nu) / std::norm(ctx.chi_m(-nu)) -
                0.25 * (ctx.port.S_L0 + ctx.S_dF(-nu));
  f.S_dF_ex_h = ctx.observed_x(+1, nu) / std::norm(ctx.chi_m(nu)) -
                0.25 * (ctx.port.S_L0 + ctx.S_dF(nu));
  return f;
}

double imprecision_psd(const DerivedParams& d, double n_c, double n_det, double omega) {
  if (!(n_c > 0.0)) throw Error(Errc::ZeroDrive, "imprecision needs n_c > 0");
  if (d.G == 0.0) throw Error(Errc::ZeroDrive, "imprecision needs G != 0");
  if (!(n_det >= 1.0)) throw Error(Errc::InvalidParameter, "n_det must be >= 1");
  const double k = d.kappa_t;
  return k * k * n_det / (16.0 * d.G * d.G * n_c * d.kappa_ex) *
         (1.0 + 4.0 * omega * omega / (k * k));
}

double heisenberg_product(const DerivedParams& d, const DriveParams& drive, double E_c,
                          double n_det) {
  if (drive.scheme != Scheme::Green)
    throw Error(Errc::UnsupportedScheme, "the imprecision/back-action product is green-only");
  const double n_c = E_c / (hbar * d.omega_c);
  const double S_imp = imprecision_psd(d, n_c, n_det, d.circuit.Omega_m);
  const double S_dF = 0.25 * back_action(d, drive, E_c).S_dF0;
  return S_imp * S_dF;
}

std::vector<DetuningSweepPoint> detuning_sweep(const DerivedParams& d, double E_c,
                                               const std::vector<double>& Delta) {
  std::vector<DetuningSweepPoint> out;
  out.reserve(Delta.size());
  for (double D : Delta) {
    const auto ba = back_action(d, DriveParams::make(Scheme::Custom, d.circuit.Omega_m, 0.0, D), E_c);
    out.push_back({D, ba.delta_Omega_m, ba.Gamma_opt, ba.Gamma_opt_prime, ba.T_eff, ba.unstable});
  }
  return out;
}

}  // namespace optomech
