#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "optomech/params.hpp"
#include "optomech/simulate.hpp"

namespace optomech::cli {

enum class Task { Derive, Spectrum, Sweep, Simulate, Compare, Optimize, Asymmetry };

const char* task_name(Task t) noexcept;
std::optional<Task> task_from_name(const std::string& name);

struct Formats {
  bool csv = true;
  bool json = false;
};

struct DriveBlock {
  Scheme scheme = Scheme::Green;
  double Delta = 0.0;            // rad/s, Custom only
  std::optional<double> V_p;     // V
  std::optional<double> n_c;     // intracavity quanta
};

struct SpectrumBlock {
  std::string kind = "output";  // output | displacement
  Frame frame = Frame::Rotating;
  double span = 0.0;            // half-width in units of Omega_m, 0 picks a default
  std::size_t points = 2001;
};

struct SweepBlock {
  double detuning_min = -2.0;  // units of Omega_m
  double detuning_max = 2.0;
  std::size_t points = 401;
  std::vector<double> kappa_t_over_2Omega;  // empty keeps the configured circuit
};

struct SimulationBlock {
  Frame frame = Frame::Rotating;
  std::optional<double> dt;  // s; empty selects half the stability bound
  double duration = 0.0;     // s
  double burn_in = -1.0;     // s
  std::size_t decimation = 1;
  int harmonics = 1;
  bool noise = true;
  std::size_t seeds = 1;
  std::size_t segment_length = 0;  // samples; 0 selects duration/16
  std::string trace_format = "binary";  // binary | csv | both | none
};

struct OptimizeBlock {
  bool from_figures = false;
  double coupling_figure = 0.0;
  double kappa_ex_over_kappa_t = 1.0;
  double delta_omega_over_Gamma = 6.0;
  double n_det = 1.0;
  double n_c_th = 0.0;
  double n_ex_th = 0.0;
  double n_m_th = 0.0;
  double kappa_t_over_Omega = 1e-3;
  double Gamma_over_Omega = 1e-6;
  double delta_omega = 0.0;  // rad/s, circuit mode
  double n_c_min = 1.0;
  double n_c_max = 1e14;
  std::size_t points = 1401;
};

struct AsymmetryBlock {
  bool simulate = false;
};

struct RunConfig {
  Task task = Task::Derive;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  Formats formats;
  bool has_circuit = false;
  CircuitParams circuit;
  std::optional<RateDesign> rates;  // set when the circuit came from [rates]
  bool has_drive = false;
  DriveBlock drive;
  SpectrumBlock spectrum;
  SweepBlock sweep;
  SimulationBlock simulation;
  OptimizeBlock optimize;
  AsymmetryBlock asymmetry;
};

/// Builds and validates a RunConfig. `task` comes from the command line; a
/// `task` key in the file must agree with it. Throws ConfigError.
RunConfig load_run_config(const std::string& path, Task task);
RunConfig build_run_config(const Document& doc, Task task);

}  // namespace optomech::cli
