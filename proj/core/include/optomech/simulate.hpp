#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

enum class MotionMode {
  Free,     // mechanics integrated with Langevin and back-action forces
  Imposed,  // x0 held at imposed_amplitude (lab: x = a cos(Omega_m t))
  Frozen,   // x0 held at its initial value (lab: x constant)
};

/// Channel selection bits. Rotating frame: cavity envelopes, x0 and the
/// detected envelopes V_l, V_p, V_h. Lab frame: phi, x, V_out and the
/// demodulated comb components demod_<n>.
namespace channels {
inline constexpr unsigned mu_l = 1u << 0;
inline constexpr unsigned mu_p = 1u << 1;
inline constexpr unsigned mu_h = 1u << 2;
inline constexpr unsigned x0 = 1u << 3;
inline constexpr unsigned V_l = 1u << 4;
inline constexpr unsigned V_p = 1u << 5;
inline constexpr unsigned V_h = 1u << 6;
inline constexpr unsigned phi = 1u << 7;
inline constexpr unsigned x = 1u << 8;
inline constexpr unsigned V_out = 1u << 9;
inline constexpr unsigned demod = 1u << 10;
inline constexpr unsigned rotating_all = mu_l | mu_p | mu_h | x0 | V_l | V_p | V_h;
inline constexpr unsigned outputs = V_l | V_p | V_h;
inline constexpr unsigned lab_all = phi | x | V_out | demod;
}  // namespace channels

struct SimConfig {
  double dt = 0.0;        // s
  double duration = 0.0;  // s, recorded span (burn-in excluded)
  std::uint64_t seed = 0;
  Frame frame = Frame::Rotating;
  std::size_t record_decimation = 1;  // block average over this many steps
  int harmonics_kept = 1;             // lab: demodulate n in [-k, k]
  double burn_in = -1.0;              // s; negative selects 10/Gamma_eff
  unsigned channel_mask = channels::rotating_all;
  bool noise = true;
  bool pump_backaction = false;  // couple the noisy mu_p instead of its steady state
  MotionMode motion = MotionMode::Free;
  double imposed_amplitude = 0.0;  // m
  std::optional<cplx> x0_initial;  // default: equilibrium draw
  double instability_factor = 1e3;
  bool stop_on_instability = true;
};

enum class ChannelKind : std::uint8_t { Real = 0, Complex = 1 };

struct TraceChannel {
  std::string name;
  ChannelKind kind = ChannelKind::Real;
  std::vector<double> data;  // complex samples interleaved (re, im)

  std::size_t size() const { return kind == ChannelKind::Complex ? data.size() / 2 : data.size(); }
};

struct TimeTrace {
  double dt = 0.0;  // spacing of recorded samples
  double t0 = 0.0;  // time of the first recorded sample (block centre)
  std::size_t n_samples = 0;
  std::vector<TraceChannel> channels;

  SimConfig config;
  std::uint64_t params_hash = 0;
  std::uint64_t steps = 0;
  bool instability_terminated = false;
  double termination_time = 0.0;
  double x0_reference_rms = 0.0;  // reference for the instability test

  const TraceChannel* channel(const std::string& name) const;
  /// Throws InvalidParameter when the channel is absent or of the wrong kind.
  std::span<const cplx> complex_view(const std::string& name) const;
  std::span<const double> real_view(const std::string& name) const;
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

/// Integrates the slowly varying amplitudes of the three comb components and
/// the mechanical envelope:
///   d mu_n/dt = (i Delta_n - kappa_t/2) mu_n + (i/2)(coupling_n + dI_n/(omega_c C_t))
///   d x0/dt   = -(Gamma_m/2) x0 + i (L0 + F0) / (2 m Omega_m)
/// with F0 = C_t omega_c G (mu_p conj(mu_l) + conj(mu_p) mu_h). Each step
/// solves the linear part exactly with the forcing held constant; the
/// couplings are explicit.
TimeTrace simulate_rotating(const DerivedParams& d, const DriveParams& drive,
                            const SimConfig& config);

/// Full circuit ODE for phi(t) with x(t) from the lab-frame oscillator and
/// F_ba = (1/2) dCg/dx (dphi/dt)^2. Classical RK4, noise held constant over
/// a step. Meant for desk-scale parameters (omega_c/Omega_m of 50 to 200).
TimeTrace simulate_lab(const DerivedParams& d, const DriveParams& drive, const SimConfig& config);

/// Dispatches on config.frame.
TimeTrace simulate(const DerivedParams& d, const DriveParams& drive, const SimConfig& config);

/// Largest admissible step for the frame.
double max_stable_dt(const DerivedParams& d, Frame frame);

/// Equilibrium <|x0|^2> under the Langevin force alone, 2 k_B T_m / (m Omega_m^2).
double thermal_x0_variance(const DerivedParams& d);

}  // namespace optomech
