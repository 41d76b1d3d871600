#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/simulate.hpp"
#include "optomech/spectrum.hpp"

namespace optomech {

enum class Window { Rectangular, Hann };

struct WelchOptions {
  std::size_t segment_length = 0;
  double overlap = 0.5;  // fraction in [0, 0.9]
  Window window = Window::Hann;
  bool detrend_mean = false;  // subtract each segment's mean before windowing
};

/// Two-sided PSD in angular frequency, (1/2pi) * sum(S) * d_omega = mean |x|^2.
/// A component exp(-i nu0 t) shows up at omega = +nu0. The grid runs from
/// -pi/dt upward in steps of 2pi/(segment_length dt). Complex input is not
/// symmetrised. Throws TooShort below 8 segments.
SpectrumResult welch_psd(std::span<const cplx> x, double dt, const WelchOptions& opt);
SpectrumResult welch_psd(std::span<const double> x, double dt, const WelchOptions& opt);
SpectrumResult welch_psd(const TimeTrace& trace, const std::string& channel,
                         const WelchOptions& opt);

/// Mean of the bins falling in each [edges[i], edges[i+1]); empty bins are
/// dropped. Components are rebinned alongside.
SpectrumResult rebin(const SpectrumResult& s, const std::vector<double>& edges);

enum class FitWeighting { Uniform, Relative };

struct FitOptions {
  FitWeighting weighting = FitWeighting::Relative;
  int max_iterations = 200;
  bool fit_offset = true;
};

struct FitResult {
  double center = 0.0;  // rad/s
  double fwhm = 0.0;    // rad/s
  double area = 0.0;    // PSD unit x rad/s
  double offset = 0.0;
  std::array<double, 4> sigma{};                // center, fwhm, area, offset
  std::array<std::array<double, 4>, 4> cov{};   // same order
  double reduced_chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Fits offset + (area/pi) (fwhm/2) / ((omega - center)^2 + (fwhm/2)^2) over
/// the bins with lo <= omega <= hi. All-zero input returns converged = false.
/// Throws AmbiguousPeak when two separate maxima of comparable height sit in
/// the window and NoConvergence at the iteration cap.
FitResult lorentzian_fit(const SpectrumResult& s, double lo, double hi,
                         const FitOptions& opt = {});

/// Lorentzian model value, shared by fits and tests.
double lorentzian(double omega, double center, double fwhm, double area, double offset);

struct SidebandAreas {
  double sigma2_minus = 0.0;  // m^2, lower sideband (omega_p - Omega_m)
  double sigma2_plus = 0.0;   // m^2, upper sideband
  double power_minus = 0.0;   // W, baseline-subtracted door integral
  double power_plus = 0.0;
  std::array<double, 3> baseline_minus{};  // offset, cavity, tail amplitude
  std::array<double, 3> baseline_plus{};
};

struct SidebandOptions {
  double exclusion_fwhm = 10.0;  // baseline bins lie beyond this many Gamma_eff of the peak
  double half_width = 0.0;       // integration half-width; 0 selects Omega_m/2 (the door)
};

/// Integrates each sideband door of an absolute-frequency output PSD after
/// removing a baseline fitted outside the peak: a flat level plus the cavity
/// lineshape |chi_n|^2. The peak's own Lorentzian tail, scaled to the
/// integrated peak, is removed from the baseline bins first. Areas are converted to
/// displacement variance with the quasi-static cavity filter. Linear in the
/// input spectrum.
SidebandAreas sideband_areas(const SpectrumResult& output, const DerivedParams& d,
                             const DriveParams& drive, const SidebandOptions& opt = {});

struct OutputSpectrumOptions {
  std::size_t segment_length = 0;
  double overlap = 0.5;
  Window window = Window::Hann;
};

/// Output PSD [W/(rad/s)] on absolute angular frequency from the detected
/// envelopes V_l, V_p, V_h of a rotating-frame trace: each door n keeps
/// |nu| < Omega_m/2 of its envelope spectrum, divided by 2 Z0. The pump's
/// mean is removed and reported as the discrete line power.
SpectrumResult output_spectrum_from_trace(const TimeTrace& trace, const DerivedParams& d,
                                          const DriveParams& drive,
                                          const OutputSpectrumOptions& opt);

}  // namespace optomech
