#include "optomech/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/trace_io.hpp"

namespace optomech {

namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  cplx* in() { return reinterpret_cast<cplx*>(in_); }
  const cplx* out() const { return reinterpret_cast<const cplx*>(out_); }
  // out[j] = sum_k in[k] exp(+2 pi i j k / n)
  void run() { fftw_execute_dft(plan_, in_, out_); }

 private:
  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

template <typename Get>
SpectrumResult welch_impl(std::size_t n, Get get, double dt, const WelchOptions& opt) {
  const std::size_t N = opt.segment_length;
  if (!(dt > 0.0)) throw Error(Errc::InvalidParameter, "welch_psd: dt must be > 0");
  if (N < 2 || N > n) throw Error(Errc::TooShort, "welch_psd: segment_length must lie in [2, n]");
  if (!(opt.overlap >= 0.0 && opt.overlap <= 0.9))
    throw Error(Errc::InvalidParameter, "welch_psd: overlap must lie in [0, 0.9]");
  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(N) * (1.0 - opt.overlap))));
  const std::size_t n_seg = (n - N) / step + 1;
  if (n_seg < 8) throw Error(Errc::TooShort, "welch_psd: fewer than 8 segments");

  std::vector<double> w(N, 1.0);
  if (opt.window == Window::Hann)
    for (std::size_t k = 0; k < N; ++k)
      w[k] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(k) / static_cast<double>(N));
  double U = 0.0;
  for (double v : w) U += v * v;
  U /= static_cast<double>(N);

  Fft fft(N);
  std::vector<double> acc(N, 0.0);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::size_t start = s * step;
    cplx mean = 0.0;
    if (opt.detrend_mean) {
      for (std::size_t k = 0; k < N; ++k) mean += get(start + k);
      mean /= static_cast<double>(N);
    }
    cplx* in = fft.in();
    for (std::size_t k = 0; k < N; ++k) in[k] = (get(start + k) - mean) * w[k];
    fft.run();
    const cplx* out = fft.out();
    for (std::size_t j = 0; j < N; ++j) acc[j] += std::norm(out[j]);
  }

  SpectrumResult r;
  r.kind = SpectrumKind::Generic;
  r.omega.resize(N);
  r.values.resize(N);
  const double scale = dt / (static_cast<double>(N) * U * static_cast<double>(n_seg));
  const double dw = two_pi / (static_cast<double>(N) * dt);
  const std::size_t half = N / 2;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t j = (k + N - half) % N;
    r.omega[k] = dw * (static_cast<double>(k) - static_cast<double>(half));
    r.values[k] = acc[j] * scale;
  }
  return r;
}

}  // namespace

SpectrumResult welch_psd(std::span<const cplx> x, double dt, const WelchOptions& opt) {
  return welch_impl(x.size(), [&](std::size_t i) { return x[i]; }, dt, opt);
}

SpectrumResult welch_psd(std::span<const double> x, double dt, const WelchOptions& opt) {
  return welch_impl(x.size(), [&](std::size_t i) { return cplx(x[i], 0.0); }, dt, opt);
}

SpectrumResult welch_psd(const TimeTrace& trace, const std::string& channel,
                         const WelchOptions& opt) {
  const auto* c = trace.channel(channel);
  if (c == nullptr) throw Error(Errc::InvalidParameter, "trace has no channel '" + channel + "'");
  auto s = c->kind == ChannelKind::Complex ? welch_psd(trace.complex_view(channel), trace.dt, opt)
                                           : welch_psd(trace.real_view(channel), trace.dt, opt);
  s.unit = std::string(channel_unit(channel)) + "^2 s";
  return s;
}

SpectrumResult rebin(const SpectrumResult& s, const std::vector<double>& edges) {
  SpectrumResult r = s;
  r.omega.clear();
  r.values.clear();
  for (auto& c : r.components) c.values.clear();
  std::size_t i = 0;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    while (i < s.omega.size() && s.omega[i] < edges[b]) ++i;
    double so = 0.0, sv = 0.0;
    std::vector<double> sc(s.components.size(), 0.0);
    std::size_t cnt = 0;
    for (; i < s.omega.size() && s.omega[i] < edges[b + 1]; ++i, ++cnt) {
      so += s.omega[i];
      sv += s.values[i];
      for (std::size_t k = 0; k < sc.size(); ++k) sc[k] += s.components[k].values[i];
    }
    if (cnt == 0) continue;
    const double inv = 1.0 / static_cast<double>(cnt);
    r.omega.push_back(so * inv);
    r.values.push_back(sv * inv);
    for (std::size_t k = 0; k < sc.size(); ++k) r.components[k].values.push_back(sc[k] * inv);
  }
  return r;
}

double lorentzian(double omega, double center, double fwhm, double area, double offset) {
  const double h = 0.5 * fwhm;
  const double x = omega - center;
  return offset + area / pi * h / (x * x + h * h);
}

FitResult lorentzian_fit(const SpectrumResult& s, double lo, double hi, const FitOptions& opt) {
  std::vector<double> w, y;
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    if (s.omega[i] < lo || s.omega[i] > hi) continue;
    w.push_back(s.omega[i]);
    y.push_back(s.values[i]);
  }
  FitResult r;
  const std::size_t n = w.size();
  const int n_par = opt.fit_offset ? 4 : 3;
  if (n < static_cast<std::size_t>(n_par) + 2) throw Error(Errc::TooShort, "lorentzian_fit: too few bins in window");
  const double ymax = *std::max_element(y.begin(), y.end());
  const double ymin = *std::min_element(y.begin(), y.end());
  if (!(ymax > 0.0) || !(ymax > ymin)) return r;  // degenerate input

  // Initial guess: argmax centre, low-quantile offset, trapezoid area.
  const std::size_t imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  std::vector<double> sorted = y;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 10), sorted.end());
  double off = opt.fit_offset ? sorted[n / 10] : 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    area += 0.5 * ((y[i] - off) + (y[i + 1] - off)) * (w[i + 1] - w[i]);
  const double height = ymax - off;
  if (!(area > 0.0) || !(height > 0.0)) return r;
  double fwhm = 2.0 * area / (pi * height);
  const double bin = (w.back() - w.front()) / static_cast<double>(n - 1);
  fwhm = std::max(fwhm, 2.0 * bin);

  // Two well separated maxima of comparable height make the fit ill-posed.
  {
    const auto half_w = static_cast<std::size_t>(std::max(0.0, std::floor(fwhm / bin / 8.0)));
    std::vector<double> sm(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i >= half_w ? i - half_w : 0;
      const std::size_t b = std::min(n - 1, i + half_w);
      double acc = 0.0;
      for (std::size_t k = a; k <= b; ++k) acc += y[k];
      sm[i] = acc / static_cast<double>(b - a + 1);
    }
    const double smax = *std::max_element(sm.begin(), sm.end());
    const double smin = *std::min_element(sm.begin(), sm.end());
    const double hi_th = smin + 0.5 * (smax - smin);
    const double lo_th = smin + 0.25 * (smax - smin);
    int regions = 0;
    bool inside = false;
    for (double v : sm) {
      if (!inside && v > hi_th) {
        inside = true;
        ++regions;
      } else if (inside && v < lo_th) {
        inside = false;
      }
    }
    if (regions > 1) throw Error(Errc::AmbiguousPeak, "lorentzian_fit: more than one peak in window");
  }

  using Vec = Eigen::Vector4d;
  using Mat = Eigen::Matrix4d;
  Vec p(w[imax], fwhm, area, off);
  const Vec scale(fwhm, fwhm, std::abs(area), std::max(std::abs(off), height));

  auto model = [&](const Vec& q, double x) { return lorentzian(x, q[0], q[1], q[2], q[3]); };
  std::vector<double> sig(n, 1.0);
  auto reweight = [&](const Vec& q) {
    if (opt.weighting == FitWeighting::Uniform) return;
    for (std::size_t i = 0; i < n; ++i) sig[i] = std::max(std::abs(model(q, w[i])), 1e-300);
  };
  auto cost = [&](const Vec& q) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = (y[i] - model(q, w[i])) / sig[i];
      c += e * e;
    }
    return c;
  };
  auto normal_eq = [&](const Vec& q, Mat& H, Vec& g) {
    H.setZero();
    g.setZero();
    const double h = 0.5 * q[1];
    for (std::size_t i = 0; i < n; ++i) {
      const double x = w[i] - q[0];
      const double D = x * x + h * h;
      Vec J;
      J[0] = q[2] / pi * h * 2.0 * x / (D * D);
      J[1] = 0.5 * q[2] / pi * (x * x - h * h) / (D * D);
      J[2] = h / (pi * D);
      J[3] = opt.fit_offset ? 1.0 : 0.0;
      J /= sig[i];
      const double e = (y[i] - model(q, w[i])) / sig[i];
      H.noalias() += J * J.transpose();
      g.noalias() += J * e;
    }
    if (!opt.fit_offset) {
      H.row(3).setZero();
      H.col(3).setZero();
      H(3, 3) = 1.0;
      g[3] = 0.0;
    }
  };

  reweight(p);
  double c0 = cost(p);
  double lambda = 1e-3;
  bool done = false;
  int it = 0;
  for (; it < opt.max_iterations && !done; ++it) {
    Mat H;
    Vec g;
    normal_eq(p, H, g);
    bool accepted = false;
    while (!accepted) {
      Mat A = H;
      for (int k = 0; k < 4; ++k) A(k, k) += lambda * std::max(H(k, k), 1e-300);
      const Vec delta = A.ldlt().solve(g);
      const Vec q = p + delta;
      const double c1 = q[1] > 0.0 ? cost(q) : INFINITY;
      if (std::isfinite(c1) && c1 <= c0) {
        const double step = (delta.array() / scale.array()).abs().maxCoeff();
        const double rel_drop = (c0 - c1) / std::max(c0, 1e-300);
        p = q;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step < 1e-10 || rel_drop < 1e-15) done = true;
        reweight(p);
        c0 = cost(p);
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          done = true;  // no further descent possible
          break;
        }
      }
    }
  }
  if (!done) throw Error(Errc::NoConvergence, "lorentzian_fit: iteration cap reached");

  Mat H;
  Vec g;
  normal_eq(p, H, g);
  const int dof = static_cast<int>(n) - n_par;
  r.reduced_chi2 = cost(p) / std::max(dof, 1);
  const Mat cov = H.inverse() * r.reduced_chi2;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r.cov[a][b] = (opt.fit_offset || (a < 3 && b < 3)) ? cov(a, b) : 0.0;
  // Parameter order in the result: center, fwhm, area, offset (same as p).
  for (int a = 0; a < 4; ++a) r.sigma[a] = std::sqrt(std::max(r.cov[a][a], 0.0));
  r.center = p[0];
  r.fwhm = p[1];
  r.area = p[2];
  r.offset = p[3];
  r.iterations = it;
  r.converged = r.fwhm > 0.0 && r.area >= 0.0 && std::isfinite(r.reduced_chi2);
  return r;
}

SidebandAreas sideband_areas(const SpectrumResult& out, const DerivedParams& d,
                             const DriveParams& drive, const SidebandOptions& opt) {
  validate_drive(d, drive);
  const auto& c = d.circuit;
  const double W = c.Omega_m;
  const double half = opt.half_width > 0.0 ? opt.half_width : 0.5 * W;
  if (half > W) throw Error(Errc::OverlapError, "sideband windows intersect (half_width > Omega_m)");
  const double E_c = out.pump_line_power > 0.0 ? out.pump_line_power / topology_map(d).kappa_detect
                                               : energy_flow(d, drive).E_c;
  const auto ba = back_action(d, drive, E_c);
  if (ba.unstable) throw Error(Errc::DomainViolation, "sideband_areas: Gamma_eff <= 0");
  if (ba.g2 <= 0.0) throw Error(Errc::ZeroDrive, "sideband_areas: no optomechanical coupling");
  const double fw = ba.Gamma_eff;
  if (opt.exclusion_fwhm * fw >= half)
    throw Error(Errc::OverlapError, "sideband peak exclusion zone does not fit in its window");
  const double nu_x = ba.Sigma.real() / (2.0 * c.m * W);  // x0 peak offset
  const double omega_p = d.omega_c + drive.Delta;
  const double kd = topology_map(d).kappa_detect;

  auto door = [&](int n, double& power, std::array<double, 3>& coef) {
    const double centre = omega_p + n * W;
    const double nu_pk = n < 0 ? -nu_x : nu_x;
    const double h = 0.5 * fw;
    const double c0 = std::norm(chi_component(drive.Delta, W, d.kappa_t, n, 0.0));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.omega.size(); ++i)
      if (std::abs(out.omega[i] - centre) <= half) idx.push_back(i);
    if (idx.size() < 8) throw Error(Errc::DomainViolation, "sideband_areas: spectrum does not cover the door");
    if (out.omega[idx.front()] > centre - half + 0.05 * half ||
        out.omega[idx.back()] < centre + half - 0.05 * half)
      throw Error(Errc::DomainViolation, "sideband_areas: spectrum does not cover the door");

    auto cav = [&](double nu) { return std::norm(chi_component(drive.Delta, W, d.kappa_t, n, nu)) / c0; };
    auto tail = [&](double nu) {
      const double x = nu - nu_pk;
      return cav(nu) * h * h / (x * x + h * h);
    };
    std::vector<std::size_t> base;
    for (std::size_t i : idx)
      if (std::abs(out.omega[i] - centre - nu_pk) > opt.exclusion_fwhm * fw) base.push_back(i);
    if (base.size() < 6) throw Error(Errc::OverlapError, "sideband_areas: too few baseline bins");
    // Fit [1, cav] to the baseline bins after removing the peak's own tail,
    // whose amplitude follows from the integrated peak; a few passes settle it.
    // Fitting the tail as a free regressor is near-collinear with cav on noisy data.
    Eigen::MatrixXd A(base.size(), 2);
    for (std::size_t r = 0; r < base.size(); ++r) {
      A(static_cast<Eigen::Index>(r), 0) = 1.0;
      A(static_cast<Eigen::Index>(r), 1) = cav(out.omega[base[r]] - centre);
    }
    const auto qr = A.colPivHouseholderQr();
    std::vector<double> om, tl;
    om.reserve(idx.size());
    tl.reserve(idx.size());
    for (std::size_t i : idx) {
      om.push_back(out.omega[i]);
      tl.push_back(tail(out.omega[i] - centre));
    }
    const double tail_area = integrate_band(om, tl, centre - half, centre + half);
    std::vector<double> res(idx.size());
    Eigen::VectorXd b(base.size());
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double amp = 0.0;
    for (int pass = 0; pass < 6; ++pass) {
      for (std::size_t r = 0; r < base.size(); ++r) {
        const double nu = out.omega[base[r]] - centre;
        b[static_cast<Eigen::Index>(r)] = out.values[base[r]] - amp * tail(nu);
      }
      x = qr.solve(b);
      for (std::size_t k = 0; k < idx.size(); ++k)
        res[k] = out.values[idx[k]] - x[0] - x[1] * cav(out.omega[idx[k]] - centre);
      power = integrate_band(om, res, centre - half, centre + half);
      amp = power / tail_area;
    }
    coef = {x[0], x[1], amp};
    return power * d.xbar2 / (kd * ba.g2 * c0);
  };

  SidebandAreas r;
  r.sigma2_minus = door(-1, r.power_minus, r.baseline_minus);
  r.sigma2_plus = door(+1, r.power_plus, r.baseline_plus);
  return r;
}

SpectrumResult output_spectrum_from_trace(const TimeTrace& trace, const DerivedParams& d,
                                          const DriveParams& drive,
                                          const OutputSpectrumOptions& opt) {
  validate_drive(d, drive);
  const double W = d.circuit.Omega_m;
  if (!(pi / trace.dt > 0.5 * W))
    throw Error(Errc::DomainViolation, "record spacing too coarse to resolve the doors");
  const double Z0 = d.circuit.Z0;
  const double omega_p = d.omega_c + drive.Delta;

  SpectrumResult r;
  r.kind = SpectrumKind::OutputPSD;
  r.unit = "W/(rad/s)";
  r.pump_line_omega = omega_p;
  r.overlap_warning = d.kappa_t / W > 0.5;
  const char* names[3] = {"V_l", "V_p", "V_h"};
  for (int n = -1; n <= 1; ++n) {
    WelchOptions w;
    w.segment_length = opt.segment_length;
    w.overlap = opt.overlap;
    w.window = opt.window;
    w.detrend_mean = n == 0;
    const auto v = trace.complex_view(names[n + 1]);
    if (n == 0) {
      cplx mean = std::accumulate(v.begin(), v.end(), cplx(0.0)) / static_cast<double>(v.size());
      r.pump_line_power = std::norm(mean) / (2.0 * Z0);
    }
    const auto s = welch_psd(v, trace.dt, w);
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
      if (s.omega[i] < -0.5 * W || s.omega[i] >= 0.5 * W) continue;
      r.omega.push_back(omega_p + n * W + s.omega[i]);
      r.values.push_back(s.values[i] / (2.0 * Z0));
    }
  }
  return r;
}

}  // namespace optomech
