#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "optomech/analytic.hpp"
#include "optomech/constants.hpp"
#include "optomech/readout.hpp"
#include "optomech/simulate.hpp"
#include "optomech/spectral.hpp"

using namespace optomech;

namespace {

// 1 MHz cavity, 10 kHz element, kappa_t = 0.1 Omega_m.
DerivedParams desk() {
  RateDesign r;
  r.Omega_m = two_pi * 1e4;
  r.omega_c = two_pi * 1e6;
  r.kappa_ex = r.kappa_in = 0.05 * r.Omega_m;
  r.C_t = 1e-10;
  r.G = 1e12;
  r.m = 1e-12;
  r.Gamma_m = 0.01 * r.Omega_m;
  r.T_m = 0.1;
  r.T_in = 0.3;
  r.T_ex = 0.1;
  return derive(design_circuit(r));
}

DriveParams red_drive(const DerivedParams& d) {
  const double W = d.circuit.Omega_m;
  const double E = energy_for_g2(d, 0.1 * d.circuit.Gamma_m * d.kappa_t);
  return DriveParams::make(Scheme::Red, W, drive_for_energy(d, -W, E));
}

void BM_RotatingSteps(benchmark::State& state) {
  const auto d = desk();
  const auto drive = red_drive(d);
  SimConfig c;
  c.dt = 0.1 / d.circuit.Omega_m;
  c.duration = static_cast<double>(state.range(0)) * c.dt;
  c.burn_in = 0.0;
  c.record_decimation = 10;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_rotating(d, drive, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RotatingSteps)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_LabSteps(benchmark::State& state) {
  const auto d = desk();
  const auto drive = red_drive(d);
  SimConfig c;
  c.frame = Frame::Lab;
  c.channel_mask = channels::lab_all;
  c.dt = max_stable_dt(d, Frame::Lab);
  c.duration = static_cast<double>(state.range(0)) * c.dt;
  c.burn_in = 0.0;
  c.record_decimation = 100;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_lab(d, drive, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LabSteps)->Arg(1 << 16)->Arg(1 << 19)->Unit(benchmark::kMillisecond);

void BM_Welch(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n;
  std::vector<cplx> x(static_cast<std::size_t>(state.range(0)));
  for (auto& z : x) z = {n(gen), n(gen)};
  WelchOptions w;
  w.segment_length = 4096;
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(x, 1e-5, w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Welch)->Arg(1 << 18)->Arg(1 << 21)->Unit(benchmark::kMillisecond);

void BM_OutputPsd(benchmark::State& state) {
  const auto d = desk();
  const auto drive = red_drive(d);
  const double E = energy_flow(d, drive).E_c;
  const double wp = d.omega_c + drive.Delta, W = d.circuit.Omega_m;
  const auto grid = linspace(wp - 1.4 * W, wp + 1.4 * W, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(output_psd(d, drive, E, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutputPsd)->Arg(4096)->Arg(65536);

void BM_DetuningSweep(benchmark::State& state) {
  const auto d = desk();
  const double E = energy_flow(d, red_drive(d)).E_c;
  std::vector<double> D = linspace(-2.0, 2.0, static_cast<std::size_t>(state.range(0)));
  for (double& v : D) v *= d.circuit.Omega_m;
  for (auto _ : state) benchmark::DoNotOptimize(detuning_sweep(d, E, D));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetuningSweep)->Arg(401)->Arg(10001);

void BM_SclOptimum(benchmark::State& state) {
  const auto m = readout_from_figures(1.6e8, 1.0, 6.0, 100.0, 6e3, 6e3, 6e5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scl_optimum(m));
    benchmark::DoNotOptimize(scl_scan_optimum(m));
  }
}
BENCHMARK(BM_SclOptimum);

}  // namespace

BENCHMARK_MAIN();
