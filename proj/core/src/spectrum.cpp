#include "optomech/spectrum.hpp"

#include <algorithm>

#include "optomech/constants.hpp"

namespace optomech {

const char* spectrum_kind_name(SpectrumKind k) noexcept {
  switch (k) {
    case SpectrumKind::Displacement: return "displacement";
    case SpectrumKind::Force: return "force";
    case SpectrumKind::OutputPSD: return "output_psd";
    case SpectrumKind::Imprecision: return "imprecision";
    case SpectrumKind::Generic: break;
  }
  return "generic";
}

const SpectrumComponent* SpectrumResult::component(const std::string& label) const {
  for (const auto& c : components)
    if (c.label == label) return &c;
  return nullptr;
}

double integrate_band(const std::vector<double>& omega, const std::vector<double>& values,
                      double lo, double hi) {
  double acc = 0.0;
  const std::size_t n = std::min(omega.size(), values.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::max(omega[i], lo);
    const double b = std::min(omega[i + 1], hi);
    if (!(b > a)) continue;
    // Linear interpolation onto the clipped segment.
    const double w = omega[i + 1] - omega[i];
    auto at = [&](double x) { return values[i] + (values[i + 1] - values[i]) * (x - omega[i]) / w; };
    acc += 0.5 * (at(a) + at(b)) * (b - a);
  }
  return acc / two_pi;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1) : lo;
  return v;
}

}  // namespace optomech
