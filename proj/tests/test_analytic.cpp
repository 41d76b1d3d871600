#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "optomech/analytic.hpp"
#include "optomech/errors.hpp"
#include "support.hpp"

using namespace optomech;
using optomech::testing::rel_close;

namespace {

DerivedParams desk(double kappa_over_Omega, double T_in = 0.3, double T_ex = 0.1) {
  auto r = testing::desk_design(kappa_over_Omega);
  r.T_in = T_in;
  r.T_ex = T_ex;
  return derive(design_circuit(r));
}

// Full width at half maximum of a sampled single peak, linear interpolation.
double sampled_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  const auto top = std::max_element(y.begin(), y.end());
  const double half = 0.5 * *top;
  std::size_t i = static_cast<std::size_t>(top - y.begin());
  std::size_t lo = i, hi = i;
  while (lo > 0 && y[lo] > half) --lo;
  while (hi + 1 < y.size() && y[hi] > half) ++hi;
  const double xl = x[lo] + (half - y[lo]) * (x[lo + 1] - x[lo]) / (y[lo + 1] - y[lo]);
  const double xh = x[hi - 1] + (half - y[hi - 1]) * (x[hi] - x[hi - 1]) / (y[hi] - y[hi - 1]);
  return xh - xl;
}

}  // namespace

TEST_CASE("susceptibilities: limits and symmetry") {
  const double W = 2.0, k = 0.3;
  const auto s0 = susceptibilities(0.0, W, k);
  CHECK(s0.chi_p.real() == doctest::Approx(2.0 / k).epsilon(1e-15));
  CHECK(s0.chi_p.imag() == 0.0);
  CHECK(std::abs(s0.chi_l - std::conj(s0.chi_h)) < 1e-15);

  const auto blue = susceptibilities(W, W, k);
  CHECK(blue.chi_l.real() == doctest::Approx(2.0 / k).epsilon(1e-15));
  CHECK(std::abs(blue.chi_h) == doctest::Approx(1.0 / std::sqrt(4.0 * W * W + k * k / 4.0)));
  const auto red = susceptibilities(-W, W, k);
  CHECK(red.chi_h.real() == doctest::Approx(2.0 / k).epsilon(1e-15));

  for (double D = -5.0; D <= 5.0; D += 0.37) {
    const auto s = susceptibilities(D, W, k);
    for (cplx c : {s.chi_p, s.chi_l, s.chi_h}) CHECK(std::abs(c) <= 2.0 / k * (1 + 1e-15));
  }
  CHECK_THROWS_AS(susceptibilities(0.0, W, 0.0), Error);
}

TEST_CASE("back_action: on resonance there is no optical damping") {
  const auto d = desk(0.1);
  const double E_c = energy_for_g2(d, 0.1 * d.circuit.Gamma_m * d.kappa_t);
  const auto ba = back_action(d, DriveParams::make(Scheme::Green, d.circuit.Omega_m, 0.0), E_c);
  CHECK(ba.Gamma_opt == 0.0);
  CHECK(ba.Gamma_eff == d.circuit.Gamma_m);
  CHECK(ba.T_eff == doctest::Approx((d.circuit.T_m * d.circuit.Gamma_m +
                                     d.T_c * ba.Gamma_opt_prime) / d.circuit.Gamma_m));
}

TEST_CASE("back_action: resolved blue damping approaches -4 g^2/kappa") {
  const auto d = desk(0.01);
  const double g2 = 1e-3 * d.circuit.Gamma_m * d.kappa_t;
  const auto ba = back_action(d, DriveParams::make(Scheme::Blue, d.circuit.Omega_m, 0.0),
                              energy_for_g2(d, g2));
  CHECK(ba.g2 == doctest::Approx(g2).epsilon(1e-13));
  CHECK(rel_close(ba.Gamma_opt, -4.0 * g2 / d.kappa_t, 1e-4));
}

TEST_CASE("back_action: parity under Delta -> -Delta on a dense grid") {
  const auto d = desk(0.5);
  const double E_c = energy_for_g2(d, 0.05 * d.circuit.Gamma_m * d.kappa_t);
  const double W = d.circuit.Omega_m;
  for (int i = 1; i <= 200; ++i) {
    const double D = 3.0 * W * i / 200.0;
    const auto p = back_action(d, DriveParams::make(Scheme::Custom, W, 0.0, D), E_c);
    const auto m = back_action(d, DriveParams::make(Scheme::Custom, W, 0.0, -D), E_c);
    CHECK(std::abs(p.delta_Omega_m + m.delta_Omega_m) <= 1e-12 * std::abs(p.delta_Omega_m));
    CHECK(std::abs(p.Gamma_opt + m.Gamma_opt) <= 1e-12 * std::abs(p.Gamma_opt));
    CHECK(std::abs(p.Gamma_opt_prime - m.Gamma_opt_prime) <= 1e-12 * p.Gamma_opt_prime);
  }
}

TEST_CASE("back_action: spring and damping follow from the self-energy") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto d = desk(0.02 + 1.5 * u(gen), 3.0 * u(gen), 3.0 * u(gen));
    const double W = d.circuit.Omega_m;
    const double D = (u(gen) - 0.5) * 6.0 * W;
    const double E_c = energy_for_g2(d, u(gen) * d.circuit.Gamma_m * d.kappa_t);
    const auto ba = back_action(d, DriveParams::make(Scheme::Custom, W, 0.0, D), E_c);
    // Self-energy written out from the bare susceptibilities.
    const auto s = susceptibilities(D, W, d.kappa_t);
    const cplx Sigma = cplx(0.0, -1.0) * d.G * d.G / d.omega_c * E_c * (s.chi_h - std::conj(s.chi_l));
    const double mW = d.circuit.m * W;
    CHECK(std::abs(ba.Sigma - Sigma) <= 1e-12 * std::abs(Sigma));
    CHECK(ba.delta_Omega_m == doctest::Approx(Sigma.real() / (2.0 * mW)).epsilon(1e-10));
    CHECK(ba.Gamma_opt == doctest::Approx(-Sigma.imag() / mW).epsilon(1e-10));
    CHECK(ba.Gamma_opt_prime >= 0.0);
    CHECK(ba.S_dF0 >= 0.0);
  }
}

TEST_CASE("displacement_psd: one lab-frame peak carries k_B T_m / (2 m Omega_m^2)") {
  auto r = testing::desk_design(0.1, 0.0);
  r.Gamma_m = 1e-3 * r.Omega_m;  // keeps the -Omega_m peak off the +-200 Gamma_m window
  const auto d = derive(design_circuit(r));
  const double W = d.circuit.Omega_m, Gm = d.circuit.Gamma_m;
  const auto grid = linspace(W - 200.0 * Gm, W + 200.0 * Gm, 400001);
  const auto s = displacement_psd(d, DriveParams::make(Scheme::Green, W, 0.0), 0.0, grid, Frame::Lab);
  const auto& plus = s.component("S_plus")->values;
  const double area = integrate_band(s.omega, plus, grid.front(), grid.back());
  const double expected = k_B * d.circuit.T_m / (2.0 * d.circuit.m * W * W);
  // A Lorentzian of FWHM Gamma_m keeps (2/pi) atan(400) of its weight in +-200 Gamma_m.
  const double kept = 2.0 / pi * std::atan(400.0);
  CHECK(rel_close(area, kept * expected, 1e-5));
  CHECK(rel_close(area / kept, expected, 1e-3));
}

TEST_CASE("displacement_psd: bare width and the blue-narrowed peak") {
  auto r = testing::desk_design(0.1);
  r.T_in = 0.0;
  r.T_ex = 0.0;  // no back-action force noise: the force PSD stays fixed
  const auto d = derive(design_circuit(r));
  const double W = d.circuit.Omega_m, Gm = d.circuit.Gamma_m;
  const auto blue = DriveParams::make(Scheme::Blue, W, 0.0);

  const auto bare_grid = linspace(-200.0 * Gm, 200.0 * Gm, 200001);
  const auto bare = displacement_psd(d, blue, 0.0, bare_grid);
  CHECK(sampled_fwhm(bare.omega, bare.values) == doctest::Approx(Gm).epsilon(1e-4));

  // g^2 such that Gamma_opt = -Gamma_m / 2 with the exact detuned filters.
  const double k = d.kappa_t;
  const double unit = k * (1.0 / (4.0 * W * W + 0.25 * k * k) - 1.0 / (0.25 * k * k));
  const double E_c = energy_for_g2(d, -0.5 * Gm / unit);
  const auto ba = back_action(d, blue, E_c);
  REQUIRE(ba.Gamma_eff == doctest::Approx(0.5 * Gm).epsilon(1e-12));
  const auto grid = linspace(ba.delta_Omega_m - 100.0 * Gm, ba.delta_Omega_m + 100.0 * Gm, 200001);
  const auto narrow = displacement_psd(d, blue, E_c, grid);
  CHECK(sampled_fwhm(narrow.omega, narrow.values) == doctest::Approx(0.5 * Gm).epsilon(1e-4));
  const double a_bare = integrate_band(bare.omega, bare.values, -200.0 * Gm, 200.0 * Gm);
  const double a_blue = integrate_band(narrow.omega, narrow.values, grid.front(), grid.back());
  CHECK(a_blue / a_bare == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("displacement_psd: grid outside the frame's range is rejected") {
  const auto d = desk(0.1);
  const double W = d.circuit.Omega_m;
  const auto drive = DriveParams::make(Scheme::Green, W, 0.0);
  CHECK_THROWS_AS(displacement_psd(d, drive, 0.0, {-6.0 * W, 0.0}), Error);
  CHECK_THROWS_AS(displacement_psd(d, drive, 0.0, {1.0, 0.0}), Error);
}

TEST_CASE("output_psd: background, cavity term and pump line") {
  const double T_in = 0.5, T_ex = 0.1;
  const auto d = desk(0.1, T_in, T_ex);
  const double W = d.circuit.Omega_m;
  const auto drive = DriveParams::make(Scheme::Green, W, 0.0);
  const double wp = d.omega_c;
  const auto grid = linspace(wp - 2.0 * W, wp + 2.0 * W, 4001);
  const auto s = output_psd(d, drive, 0.0, grid);
  const auto* bg = s.component("background");
  const auto* cav = s.component("cavity");
  REQUIRE(bg);
  REQUIRE(cav);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(bg->values[i] == doctest::Approx(2.0 * k_B * T_ex).epsilon(1e-12));
    const double nu = grid[i] - wp;
    const double expected =
        std::abs(nu) < 1.5 * W
            ? d.kappa_ex * k_B * (d.T_c - T_ex) * d.kappa_t / (nu * nu + 0.25 * d.kappa_t * d.kappa_t)
            : 0.0;
    CHECK(cav->values[i] == doctest::Approx(expected).epsilon(1e-10).scale(1e-40));
    CHECK(s.values[i] >= 0.0);
  }
  // Half maximum of the cavity peak sits at +-kappa_t/2.
  std::vector<double> x, y;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - wp) < 0.5 * W) {
      x.push_back(grid[i]);
      y.push_back(cav->values[i]);
    }
  CHECK(sampled_fwhm(x, y) == doctest::Approx(d.kappa_t).epsilon(1e-3));

  const double E_c = 1e-12;
  const auto sp = output_psd(d, drive, E_c, grid);
  CHECK(sp.pump_line_power == doctest::Approx(E_c * d.kappa_ex).epsilon(1e-14));
  CHECK(sp.pump_line_omega == wp);
}

TEST_CASE("output_psd: no cavity feature when T_c = T_ex") {
  const auto d = desk(0.2, 0.25, 0.25);
  const double W = d.circuit.Omega_m;
  for (Scheme sc : {Scheme::Red, Scheme::Green, Scheme::Blue}) {
    const auto drive = DriveParams::make(sc, W, 0.0);
    const auto grid = linspace(d.omega_c + drive.Delta - 2.0 * W, d.omega_c + drive.Delta + 2.0 * W, 801);
    const double E_c = energy_for_g2(d, 0.05 * d.circuit.Gamma_m * d.kappa_t);
    const auto s = output_psd(d, drive, E_c, grid);
    const double level = 2.0 * k_B * 0.25;
    for (double v : s.component("cavity")->values) CHECK(std::abs(v) <= 1e-12 * level);
  }
}

TEST_CASE("output_psd: overlap warning above kappa_t / Omega_m = 0.5") {
  const double W = two_pi * 1e4;
  const auto grid = linspace(two_pi * 1e6 - 2.0 * W, two_pi * 1e6 + 2.0 * W, 11);
  CHECK_FALSE(output_psd(desk(0.4), DriveParams::make(Scheme::Green, W, 0.0), 0.0, grid).overlap_warning);
  CHECK(output_psd(desk(0.6), DriveParams::make(Scheme::Green, W, 0.0), 0.0, grid).overlap_warning);
}

TEST_CASE("output_psd: green sideband areas match the closed-form asymmetry") {
  // Resolved regime; sideband area -> sigma^2 through the flat cavity filter.
  const double T_ex = 2.0;
  const auto d = desk(0.01, 0.5, T_ex);
  const auto& c = d.circuit;
  const double W = c.Omega_m;
  const auto drive = DriveParams::make(Scheme::Green, W, 0.0);
  const double g2 = 0.05 * c.Gamma_m * d.kappa_t;
  const double E_c = energy_for_g2(d, g2);
  const auto ba = back_action(d, drive, E_c);
  const auto f = sideband_asymmetry(d, drive, E_c);
  const double base = 0.25 * (ba.S_L0 + ba.S_dF0);
  const double norm = 4.0 * c.m * c.m * W * W * ba.Gamma_eff;
  const double sig_minus = (base + *f.S_dF_ex_l) / norm;
  const double sig_plus = (base + *f.S_dF_ex_h) / norm;

  for (int n : {-1, +1}) {
    const double centre = d.omega_c + n * W + (n == -1 ? -1.0 : 1.0) * ba.delta_Omega_m;
    const auto grid = linspace(centre - 400.0 * c.Gamma_m, centre + 400.0 * c.Gamma_m, 160001);
    const auto s = output_psd(d, drive, E_c, grid);
    const auto& sb = s.component(n == -1 ? "sideband_l" : "sideband_h")->values;
    const double P = integrate_band(grid, sb, grid.front(), grid.back());
    const double sigma2 = P * d.xbar2 / (d.kappa_ex * g2 * 4.0 / (d.kappa_t * d.kappa_t + 4.0 * W * W));
    CHECK(rel_close(sigma2, n == -1 ? sig_minus : sig_plus, 1e-2));
  }
}

TEST_CASE("sideband_asymmetry: closed forms") {
  const double W = two_pi * 1e4;
  SUBCASE("green is antisymmetric and vanishes with T_ex") {
    const auto d = desk(0.1, 0.3, 0.4);
    const auto f = sideband_asymmetry(d, DriveParams::make(Scheme::Green, W, 0.0), 1e-12);
    CHECK(*f.S_dF_ex_l == -*f.S_dF_ex_h);
    const auto z = sideband_asymmetry(desk(0.1, 0.3, 0.0), DriveParams::make(Scheme::Green, W, 0.0), 1e-12);
    CHECK(*z.S_dF_ex_l == 0.0);
    CHECK(*z.S_dF_ex_h == 0.0);
  }
  SUBCASE("blue and red report one sideband each") {
    const auto d = desk(0.1);
    CHECK(sideband_asymmetry(d, DriveParams::make(Scheme::Blue, W, 0.0), 0.0).S_dF_ex_l.has_value());
    CHECK_FALSE(sideband_asymmetry(d, DriveParams::make(Scheme::Blue, W, 0.0), 0.0).S_dF_ex_h.has_value());
    CHECK(sideband_asymmetry(d, DriveParams::make(Scheme::Red, W, 0.0), 0.0).S_dF_ex_h.has_value());
  }
  SUBCASE("custom detuning is unsupported") {
    try {
      sideband_asymmetry(desk(0.1), DriveParams::make(Scheme::Custom, W, 0.0, 0.3 * W), 0.0);
      FAIL("expected UnsupportedScheme");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnsupportedScheme);
    }
  }
}

TEST_CASE("sideband asymmetry: blue minus red observed areas") {
  // Gamma_opt -> 0 and T_c = T_ex = T: (sigma-^2 - sigma+^2)/<dx^2> = 2 (T/T_m)(Omega_m/omega_c).
  const double T = 1.0;
  const auto d = desk(0.01, T, T);
  const auto& c = d.circuit;
  const double W = c.Omega_m;
  const double E_c = energy_for_g2(d, 1e-4 * c.Gamma_m * d.kappa_t);
  const auto nu = linspace(-300.0 * c.Gamma_m, 300.0 * c.Gamma_m, 120001);
  const auto blue = sideband_displacement_psd(d, DriveParams::make(Scheme::Blue, W, 0.0), E_c, nu);
  const auto red = sideband_displacement_psd(d, DriveParams::make(Scheme::Red, W, 0.0), E_c, nu);
  const double s_minus = integrate_band(nu, blue.S_minus, nu.front(), nu.back());
  const double s_plus = integrate_band(nu, red.S_plus, nu.front(), nu.back());
  const double kept = 2.0 / pi * std::atan(600.0);
  const double dx2 = kept * k_B * c.T_m / (2.0 * c.m * W * W);
  const double expected = 2.0 * (T / c.T_m) * (W / d.omega_c);
  CHECK(rel_close((s_minus - s_plus) / dx2, expected, 2e-2));
}

TEST_CASE("apparent_force_psd approaches the green closed form when resolved") {
  const auto d = desk(0.005, 0.2, 0.6);
  const double W = d.circuit.Omega_m;
  const auto drive = DriveParams::make(Scheme::Green, W, 0.0);
  const double E_c = energy_for_g2(d, 0.01 * d.circuit.Gamma_m * d.kappa_t);
  const auto closed = sideband_asymmetry(d, drive, E_c);
  const auto gen = apparent_force_psd(d, drive, E_c, 0.0);
  CHECK(rel_close(gen.S_dF_ex_l, *closed.S_dF_ex_l, 2e-2));
  CHECK(rel_close(gen.S_dF_ex_h, *closed.S_dF_ex_h, 2e-2));
}

TEST_CASE("imprecision_psd") {
  auto r = testing::desk_design(0.1);
  r.kappa_in = 1e-9 * r.kappa_ex;  // kappa_t -> kappa_ex
  const auto d = derive(design_circuit(r));
  const double S = imprecision_psd(d, 1e6, 1.0, 0.0);
  CHECK(S == doctest::Approx(d.kappa_t / (16.0 * d.G * d.G * 1e6)).epsilon(1e-8));
  CHECK(imprecision_psd(d, 2e6, 1.0, 0.3) == doctest::Approx(0.5 * imprecision_psd(d, 1e6, 1.0, 0.3)));
  try {
    imprecision_psd(d, 0.0, 1.0, 0.0);
    FAIL("expected ZeroDrive");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDrive);
  }
}

TEST_CASE("heisenberg_product equals (hbar^2/4)(kappa_t/kappa_ex)(2 n_c_th) n_det") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    auto r = testing::desk_design(0.01 + 0.4 * u(gen), std::pow(10.0, 10.0 + 4.0 * u(gen)));
    const double share = 0.05 + 0.9 * u(gen);
    const double kt = r.kappa_ex + r.kappa_in;
    r.kappa_ex = share * kt;
    r.kappa_in = (1.0 - share) * kt;
    r.T_in = 5.0 * u(gen);
    r.T_ex = 5.0 * u(gen);
    const auto d = derive(design_circuit(r));
    const double n_det = 1.0 + 100.0 * u(gen);
    const double n_c = std::pow(10.0, 2.0 + 8.0 * u(gen));
    const double E_c = n_c * hbar * d.omega_c;
    const double prod = heisenberg_product(d, DriveParams::make(Scheme::Green, r.Omega_m, 0.0), E_c, n_det);
    const double n_c_th = populations(d, E_c).n_c_th;
    const double expected = 0.25 * hbar * hbar * (d.kappa_t / d.kappa_ex) * 2.0 * n_c_th * n_det;
    CHECK(rel_close(prod, expected, 1e-9));
  }
}

TEST_CASE("detuning_sweep reproduces back_action pointwise") {
  const auto d = desk(0.3);
  const double W = d.circuit.Omega_m;
  const double E_c = energy_for_g2(d, 0.02 * d.circuit.Gamma_m * d.kappa_t);
  const auto grid = linspace(-2.0 * W, 2.0 * W, 41);
  const auto sweep = detuning_sweep(d, E_c, grid);
  REQUIRE(sweep.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ba = back_action(d, DriveParams::make(Scheme::Custom, W, 0.0, grid[i]), E_c);
    CHECK(sweep[i].Gamma_opt == ba.Gamma_opt);
    CHECK(sweep[i].T_eff == ba.T_eff);
  }
}
