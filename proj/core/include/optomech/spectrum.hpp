#pragma once

#include <string>
#include <vector>

namespace optomech {

enum class SpectrumKind { Displacement, Force, OutputPSD, Imprecision, Generic };
enum class Frame { Rotating, Lab };

const char* spectrum_kind_name(SpectrumKind k) noexcept;

struct SpectrumComponent {
  std::string label;
  std::vector<double> values;
};

/// Sampled two-sided PSD in angular frequency, normalised so that
/// (1/2pi) * integral(S d omega) is the variance.
struct SpectrumResult {
  std::vector<double> omega;   // rad/s, strictly increasing
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::Generic;
  std::string unit;
  std::vector<SpectrumComponent> components;
  double pump_line_omega = 0.0;  // rad/s, OutputPSD only
  double pump_line_power = 0.0;  // W, discrete line (never on the grid)
  bool unstable = false;         // Gamma_eff <= 0
  bool overlap_warning = false;  // kappa_t / Omega_m > 0.5

  const SpectrumComponent* component(const std::string& label) const;
};

/// Trapezoidal (1/2pi) * integral of `values` over omega in [lo, hi].
double integrate_band(const std::vector<double>& omega, const std::vector<double>& values,
                      double lo, double hi);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace optomech
