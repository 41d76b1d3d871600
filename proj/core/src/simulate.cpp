#include "optomech/simulate.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/port_model.hpp"
#include "optomech/rng.hpp"

namespace optomech {

const TraceChannel* TimeTrace::channel(const std::string& name) const {
  for (const auto& c : channels)
    if (c.name == name) return &c;
  return nullptr;
}

std::span<const cplx> TimeTrace::complex_view(const std::string& name) const {
  const auto* c = channel(name);
  if (c == nullptr || c->kind != ChannelKind::Complex)
    throw Error(Errc::InvalidParameter, "trace has no complex channel '" + name + "'");
  // std::complex<double> is layout-compatible with double[2].
  return {reinterpret_cast<const cplx*>(c->data.data()), c->data.size() / 2};
}

std::span<const double> TimeTrace::real_view(const std::string& name) const {
  const auto* c = channel(name);
  if (c == nullptr || c->kind != ChannelKind::Real)
    throw Error(Errc::InvalidParameter, "trace has no real channel '" + name + "'");
  return {c->data.data(), c->data.size()};
}

double max_stable_dt(const DerivedParams& d, Frame frame) {
  if (frame == Frame::Lab) return two_pi / (d.omega_c * 50.0);
  const auto& c = d.circuit;
  return std::min({2.0 / d.kappa_t, 2.0 / c.Gamma_m, two_pi / c.Omega_m}) / 20.0;
}

double thermal_x0_variance(const DerivedParams& d) {
  const auto& c = d.circuit;
  return 2.0 * k_B * c.T_m / (c.m * c.Omega_m * c.Omega_m);
}

namespace {

// Stream ids of the independent noise sources.
enum Stream : std::uint64_t {
  kCavL = 0, kCavP = 1, kCavH = 2,  // cavity current noise (all of it, or the non-detector part)
  kDetL = 3, kDetP = 4, kDetH = 5,  // detection-port resistor, kept separate when V_n is recorded
  kXiL = 6, kXiP = 7, kXiH = 8,     // detector-side noise
  kLangevin = 9,
  kInit = 10,
};

void validate_config(const DerivedParams& d, const SimConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(Errc::InvalidSimConfig, m); };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be finite and > 0");
  if (!(cfg.duration > 0.0) || !std::isfinite(cfg.duration)) fail("duration must be finite and > 0");
  if (cfg.record_decimation < 1) fail("record_decimation must be >= 1");
  if (!std::isfinite(cfg.burn_in)) fail("burn_in must be finite");
  if (!(cfg.instability_factor > 1.0)) fail("instability_factor must exceed 1");
  if (cfg.harmonics_kept < 0) fail("harmonics_kept must be >= 0");
  if (!std::isfinite(cfg.imposed_amplitude)) fail("imposed_amplitude must be finite");
  const double lim = max_stable_dt(d, cfg.frame);
  if (cfg.dt > lim * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "dt = " << cfg.dt << " s exceeds the stability bound " << lim << " s for the "
       << (cfg.frame == Frame::Rotating ? "rotating" : "lab") << " frame";
    fail(os.str());
  }
  if (cfg.duration / cfg.dt < static_cast<double>(cfg.record_decimation))
    fail("duration shorter than one record block");
}

// Block-averaging recorder with a fixed channel layout.
class Recorder {
 public:
  Recorder(TimeTrace& tr, std::size_t n_rec, std::size_t dec) : tr_(tr), n_rec_(n_rec), dec_(dec) {}

  int add(const std::string& name, ChannelKind kind) {
    TraceChannel c;
    c.name = name;
    c.kind = kind;
    c.data.reserve(n_rec_ * (kind == ChannelKind::Complex ? 2 : 1));
    tr_.channels.push_back(std::move(c));
    acc_.emplace_back(0.0, 0.0);
    return static_cast<int>(tr_.channels.size()) - 1;
  }

  void put(int idx, cplx v) {
    if (idx >= 0) acc_[static_cast<std::size_t>(idx)] += v;
  }

  // Call once per step; returns true when a block has been flushed.
  bool step() {
    if (++count_ < dec_) return false;
    const double inv = 1.0 / static_cast<double>(dec_);
    for (std::size_t i = 0; i < acc_.size(); ++i) {
      const cplx v = acc_[i] * inv;
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite sample in channel '" << tr_.channels[i].name << "' at record "
           << tr_.n_samples;
        throw Error(Errc::NonFiniteSample, os.str());
      }
      auto& data = tr_.channels[i].data;
      data.push_back(v.real());
      if (tr_.channels[i].kind == ChannelKind::Complex) data.push_back(v.imag());
      acc_[i] = 0.0;
    }
    count_ = 0;
    ++tr_.n_samples;
    return true;
  }

  bool full() const { return tr_.n_samples >= n_rec_; }

 private:
  TimeTrace& tr_;
  std::size_t n_rec_;
  std::size_t dec_;
  std::size_t count_ = 0;
  std::vector<cplx> acc_;
};

struct Schedule {
  std::uint64_t burn_steps = 0;
  std::size_t n_rec = 0;
};

Schedule schedule(const DerivedParams& d, const DriveParams& drive, const SimConfig& cfg) {
  Schedule s;
  double burn = cfg.burn_in;
  if (burn < 0.0) {
    const double E_c = energy_flow(d, drive).E_c;
    const auto ba = back_action(d, drive, E_c);
    const double rate = ba.Gamma_eff > 0.0 ? ba.Gamma_eff : d.circuit.Gamma_m;
    burn = cfg.motion == MotionMode::Free ? 10.0 / rate : 10.0 / d.kappa_t;
  }
  s.burn_steps = static_cast<std::uint64_t>(std::llround(burn / cfg.dt));
  const auto rec_steps = static_cast<std::uint64_t>(std::llround(cfg.duration / cfg.dt));
  s.n_rec = static_cast<std::size_t>(rec_steps / cfg.record_decimation);
  return s;
}

// Exact one-step propagation of dy/dt = a y + f with f constant:
// y1 = e y0 + p f, step average = e_avg y0 + p_avg f.
struct LinearStep {
  cplx e, p, e_avg, p_avg;
  LinearStep(cplx a, double dt) {
    e = std::exp(a * dt);
    p = (e - 1.0) / a;
    e_avg = p / dt;
    p_avg = (e_avg - 1.0) / a;
  }
};

}  // namespace

TimeTrace simulate_rotating(const DerivedParams& d, const DriveParams& drive,
                            const SimConfig& cfg) {
  validate_drive(d, drive);
  validate_config(d, cfg);
  const auto& c = d.circuit;
  const auto port = port_model(d);
  const double dt = cfg.dt;
  const double wC = d.omega_c * d.C_t;
  const double W = c.Omega_m;
  const double k = d.kappa_t;
  const cplx I(0.0, 1.0);
  unsigned mask = cfg.channel_mask & channels::rotating_all;
  if (mask == 0) mask = channels::rotating_all;
  const bool free = cfg.motion == MotionMode::Free;

  const double E_c = energy_flow(d, drive).E_c;
  const auto ba = back_action(d, drive, E_c);
  const cplx mu_ss = pump_amplitude(d, drive);

  // Component order l, p, h.
  const std::array<LinearStep, 3> cav = {LinearStep(cplx(-0.5 * k, drive.Delta - W), dt),
                                         LinearStep(cplx(-0.5 * k, drive.Delta), dt),
                                         LinearStep(cplx(-0.5 * k, drive.Delta + W), dt)};
  const LinearStep mech(cplx(-0.5 * c.Gamma_m, 0.0), dt);

  const std::array<unsigned, 3> v_bit = {channels::V_l, channels::V_p, channels::V_h};
  std::array<bool, 3> split{};
  std::array<double, 3> var_cav{}, var_det{}, var_xi{};
  for (int n = 0; n < 3; ++n) {
    split[n] = (mask & v_bit[n]) != 0;
    if (!cfg.noise) continue;
    var_cav[n] = (split[n] ? port.S_I_in + port.S_I_oth : port.S_I_total()) / dt;
    var_det[n] = split[n] ? port.S_I_det / dt : 0.0;
    var_xi[n] = split[n] ? port.S_xi / dt : 0.0;
  }
  const double var_L = cfg.noise && free ? port.S_L0 / dt : 0.0;
  const bool pump_noise =
      cfg.noise && (cfg.pump_backaction || (mask & (channels::mu_p | channels::V_p)) != 0);

  std::array<NormalStream, 3> s_cav = {NormalStream(cfg.seed, kCavL), NormalStream(cfg.seed, kCavP),
                                       NormalStream(cfg.seed, kCavH)};
  std::array<NormalStream, 3> s_det = {NormalStream(cfg.seed, kDetL), NormalStream(cfg.seed, kDetP),
                                       NormalStream(cfg.seed, kDetH)};
  std::array<NormalStream, 3> s_xi = {NormalStream(cfg.seed, kXiL), NormalStream(cfg.seed, kXiP),
                                      NormalStream(cfg.seed, kXiH)};
  NormalStream s_L(cfg.seed, kLangevin);
  NormalStream s_init(cfg.seed, kInit);

  // Initial state: equilibrium x0, cavity at its driven quasi-static value.
  const double m2W = 2.0 * c.m * W;
  const double S_force = ba.S_L0 + ba.S_dF0;
  const double var_eq = ba.Gamma_eff > 0.0 ? S_force / (m2W * m2W * ba.Gamma_eff)
                                           : thermal_x0_variance(d);
  cplx x0 = 0.0;
  switch (cfg.motion) {
    case MotionMode::Free:
      if (cfg.x0_initial) x0 = *cfg.x0_initial;
      else if (cfg.noise) x0 = s_init.complex_normal(var_eq);
      break;
    case MotionMode::Imposed: x0 = cfg.imposed_amplitude; break;
    case MotionMode::Frozen: x0 = cfg.x0_initial.value_or(0.0); break;
  }
  const auto sus = susceptibilities(drive.Delta, W, k);
  cplx mu_l = 0.5 * I * d.G * std::conj(x0) * mu_ss * sus.chi_l;
  cplx mu_h = 0.5 * I * d.G * x0 * mu_ss * sus.chi_h;
  cplx dmu_p = 0.0;  // pump fluctuation around mu_ss

  double ref_var = thermal_x0_variance(d);
  if (!(ref_var > 0.0)) ref_var = var_eq > 0.0 && std::isfinite(var_eq) ? var_eq : std::norm(x0);
  const double limit2 = ref_var > 0.0 ? cfg.instability_factor * cfg.instability_factor * ref_var
                                      : INFINITY;

  const auto sch = schedule(d, drive, cfg);
  TimeTrace tr;
  tr.config = cfg;
  tr.params_hash = params_hash(c);
  tr.dt = dt * static_cast<double>(cfg.record_decimation);
  tr.t0 = static_cast<double>(sch.burn_steps) * dt + 0.5 * tr.dt;
  tr.x0_reference_rms = std::sqrt(ref_var);
  Recorder rec(tr, sch.n_rec, cfg.record_decimation);
  const auto C = ChannelKind::Complex;
  const int i_mu_l = (mask & channels::mu_l) ? rec.add("mu_l", C) : -1;
  const int i_mu_p = (mask & channels::mu_p) ? rec.add("mu_p", C) : -1;
  const int i_mu_h = (mask & channels::mu_h) ? rec.add("mu_h", C) : -1;
  const int i_x0 = (mask & channels::x0) ? rec.add("x0", C) : -1;
  const int i_V_l = split[0] ? rec.add("V_l", C) : -1;
  const int i_V_p = split[1] ? rec.add("V_p", C) : -1;
  const int i_V_h = split[2] ? rec.add("V_h", C) : -1;

  const double G = d.G;
  const double F_scale = d.C_t * d.omega_c * G;
  const double half_over_wC = 0.5 / wC;
  const double a_out = port.a_out;
  const cplx ibeta = I * port.beta;
  const std::uint64_t total = sch.burn_steps + sch.n_rec * cfg.record_decimation;

  for (std::uint64_t step = 0; step < total; ++step) {
    ++tr.steps;
    // Current noise samples (dI per component).
    std::array<cplx, 3> dI_det{};
    std::array<cplx, 3> dI{};
    for (int n = 0; n < 3; ++n) {
      if (n == 1 && !pump_noise) continue;
      if (var_cav[n] > 0.0) dI[n] = s_cav[n].complex_normal(var_cav[n]);
      if (var_det[n] > 0.0) {
        dI_det[n] = s_det[n].complex_normal(var_det[n]);
        dI[n] += dI_det[n];
      }
    }

    const cplx mu_p_now = mu_ss + dmu_p;
    const cplx mu_ref = cfg.pump_backaction ? mu_p_now : mu_ss;

    const cplx f_l = I * (0.5 * G * std::conj(x0) * mu_ref + half_over_wC * dI[0]);
    const cplx f_p = I * half_over_wC * dI[1];
    const cplx f_h = I * (0.5 * G * x0 * mu_ref + half_over_wC * dI[2]);

    const cplx ml_avg = cav[0].e_avg * mu_l + cav[0].p_avg * f_l;
    const cplx dp_avg = cav[1].e_avg * dmu_p + cav[1].p_avg * f_p;
    const cplx mh_avg = cav[2].e_avg * mu_h + cav[2].p_avg * f_h;
    mu_l = cav[0].e * mu_l + cav[0].p * f_l;
    dmu_p = cav[1].e * dmu_p + cav[1].p * f_p;
    mu_h = cav[2].e * mu_h + cav[2].p * f_h;
    const cplx mp_avg = mu_ss + dp_avg;

    cplx x_avg = x0;
    if (free) {
      const cplx mu_f = cfg.pump_backaction ? mp_avg : mu_ss;
      const cplx F0 = F_scale * (mu_f * std::conj(ml_avg) + std::conj(mu_f) * mh_avg);
      const cplx L0 = var_L > 0.0 ? s_L.complex_normal(var_L) : cplx(0.0);
      const cplx f_x = I * (L0 + F0) / m2W;
      x_avg = mech.e_avg * x0 + mech.p_avg * f_x;
      x0 = mech.e * x0 + mech.p * f_x;
      if (std::norm(x0) > limit2) {
        tr.instability_terminated = true;
        tr.termination_time = static_cast<double>(step + 1) * dt;
        if (cfg.stop_on_instability) break;
      }
    }

    if (step < sch.burn_steps) continue;
    rec.put(i_mu_l, ml_avg);
    rec.put(i_mu_p, mp_avg);
    rec.put(i_mu_h, mh_avg);
    rec.put(i_x0, x_avg);
    if (i_V_l >= 0) rec.put(i_V_l, -a_out * ml_avg + ibeta * dI_det[0] + s_xi[0].complex_normal(var_xi[0]));
    if (i_V_p >= 0) rec.put(i_V_p, -a_out * mp_avg + ibeta * dI_det[1] + s_xi[1].complex_normal(var_xi[1]));
    if (i_V_h >= 0) rec.put(i_V_h, -a_out * mh_avg + ibeta * dI_det[2] + s_xi[2].complex_normal(var_xi[2]));
    rec.step();
  }
  return tr;
}

TimeTrace simulate_lab(const DerivedParams& d, const DriveParams& drive, const SimConfig& cfg) {
  validate_drive(d, drive);
  validate_config(d, cfg);
  const auto& c = d.circuit;
  const auto port = port_model(d);
  const double dt = cfg.dt;
  const double W = c.Omega_m;
  const double wp = d.omega_c + drive.Delta;
  const double cg = c.dCg_dx;
  const double inv_L = d.omega_c * d.omega_c * d.C_t;
  const double G_t = d.kappa_t * d.C_t;  // 1/R_t
  const cplx I_p = drive_current(d, drive);
  const cplx mu_ss = pump_amplitude(d, drive);
  unsigned mask = cfg.channel_mask & channels::lab_all;
  if (mask == 0) mask = channels::lab_all;

  // Real white sources: two-sided PSD is a quarter of the envelope PSD.
  const double var_I = cfg.noise ? 0.25 * port.S_I_total() / dt : 0.0;
  const double var_F = cfg.noise && cfg.motion == MotionMode::Free ? 0.25 * port.S_L0 / dt : 0.0;
  const double var_V = cfg.noise ? 0.25 * (port.S_xi + port.beta * port.beta * port.S_I_det) / dt : 0.0;
  NormalStream s_I(cfg.seed, kCavP);
  NormalStream s_F(cfg.seed, kLangevin);
  NormalStream s_V(cfg.seed, kXiP);
  NormalStream s_init(cfg.seed, kInit);

  // State: phi, dphi/dt, x, dx/dt.
  std::array<double, 4> y{};
  y[0] = mu_ss.real();
  y[1] = (cplx(0.0, -wp) * mu_ss).real();
  cplx x0i = cfg.x0_initial.value_or(0.0);
  if (cfg.motion == MotionMode::Free && !cfg.x0_initial && cfg.noise)
    x0i = s_init.complex_normal(thermal_x0_variance(d));
  y[2] = x0i.real();
  y[3] = W * x0i.imag();

  const double a_imp = cfg.imposed_amplitude;
  auto motion = [&](double t, const std::array<double, 4>& s, double& x, double& v) {
    switch (cfg.motion) {
      case MotionMode::Imposed:
        x = a_imp * std::cos(W * t);
        v = -a_imp * W * std::sin(W * t);
        return;
      case MotionMode::Frozen:
        x = y[2];
        v = 0.0;
        return;
      case MotionMode::Free:
        x = s[2];
        v = s[3];
        return;
    }
  };

  auto rhs = [&](double t, const std::array<double, 4>& s, double In, double Fn) {
    double x = 0.0, v = 0.0;
    motion(t, s, x, v);
    const double Id = (I_p * std::exp(cplx(0.0, -wp * t))).real();
    const double ddphi = (Id + In - (G_t + cg * v) * s[1] - inv_L * s[0]) / (d.C_t + cg * x);
    std::array<double, 4> r{s[1], ddphi, 0.0, 0.0};
    if (cfg.motion == MotionMode::Free) {
      const double F_ba = 0.5 * cg * s[1] * s[1];
      r[2] = s[3];
      r[3] = (Fn + F_ba) / c.m - c.Gamma_m * s[3] - W * W * s[2];
    }
    return r;
  };

  const auto sch = schedule(d, drive, cfg);
  TimeTrace tr;
  tr.config = cfg;
  tr.params_hash = params_hash(c);
  tr.dt = dt * static_cast<double>(cfg.record_decimation);
  // Samples are taken at step starts, so a block centre sits (D-1)/2 steps in.
  tr.t0 = (static_cast<double>(sch.burn_steps) +
           0.5 * static_cast<double>(cfg.record_decimation - 1)) * dt;
  const double ref_var = thermal_x0_variance(d);
  tr.x0_reference_rms = std::sqrt(ref_var);
  const double limit = cfg.instability_factor * std::sqrt(ref_var);

  Recorder rec(tr, sch.n_rec, cfg.record_decimation);
  const int i_phi = (mask & channels::phi) ? rec.add("phi", ChannelKind::Real) : -1;
  const int i_x = (mask & channels::x) ? rec.add("x", ChannelKind::Real) : -1;
  const int i_V = (mask & channels::V_out) ? rec.add("V_out", ChannelKind::Real) : -1;
  std::vector<int> i_dem;
  std::vector<double> w_dem;
  if (mask & channels::demod) {
    for (int n = -cfg.harmonics_kept; n <= cfg.harmonics_kept; ++n) {
      i_dem.push_back(rec.add("demod_" + std::to_string(n), ChannelKind::Complex));
      w_dem.push_back(wp + n * W);
    }
  }

  const std::uint64_t total = sch.burn_steps + sch.n_rec * cfg.record_decimation;
  const double a_out = port.a_out;
  for (std::uint64_t step = 0; step < total; ++step) {
    const double t = static_cast<double>(step) * dt;
    if (step >= sch.burn_steps) {
      double x = 0.0, v = 0.0;
      motion(t, y, x, v);
      rec.put(i_phi, y[0]);
      rec.put(i_x, x);
      if (i_V >= 0) rec.put(i_V, -a_out * y[0] + (var_V > 0.0 ? std::sqrt(var_V) * s_V.next() : 0.0));
      for (std::size_t j = 0; j < i_dem.size(); ++j)
        rec.put(i_dem[j], 2.0 * y[0] * std::exp(cplx(0.0, w_dem[j] * t)));
      rec.step();
    }

    const double In = var_I > 0.0 ? std::sqrt(var_I) * s_I.next() : 0.0;
    const double Fn = var_F > 0.0 ? std::sqrt(var_F) * s_F.next() : 0.0;
    const auto k1 = rhs(t, y, In, Fn);
    std::array<double, 4> tmp;
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const auto k2 = rhs(t + 0.5 * dt, tmp, In, Fn);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const auto k3 = rhs(t + 0.5 * dt, tmp, In, Fn);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + dt * k3[i];
    const auto k4 = rhs(t + dt, tmp, In, Fn);
    for (int i = 0; i < 4; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++tr.steps;

    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2]) || !std::isfinite(y[3])) {
      std::ostringstream os;
      os << "non-finite lab-frame state at t = " << t + dt << " s";
      throw Error(Errc::NonFiniteSample, os.str());
    }
    if (cfg.motion == MotionMode::Free && limit > 0.0) {
      const double amp = std::hypot(y[2], y[3] / W);
      if (amp > limit) {
        tr.instability_terminated = true;
        tr.termination_time = t + dt;
        if (cfg.stop_on_instability) break;
      }
    }
  }
  return tr;
}

TimeTrace simulate(const DerivedParams& d, const DriveParams& drive, const SimConfig& config) {
  return config.frame == Frame::Lab ? simulate_lab(d, drive, config)
                                    : simulate_rotating(d, drive, config);
}

}  // namespace optomech
