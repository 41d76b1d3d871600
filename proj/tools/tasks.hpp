#pragma once

#include "artifacts.hpp"
#include "optomech/params.hpp"
#include "run_config.hpp"

namespace optomech::cli {

struct RunOptions {
  bool allow_instability = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_domain = 3;
inline constexpr int exit_instability = 4;

/// Runs the configured task, writing into `out`. Returns the exit code for
/// completed runs; errors propagate as exceptions.
int run_task(const RunConfig& rc, const RunOptions& opt, Artifacts& out);

// Shared by the task files.
struct Operating {
  DerivedParams d;
  DriveParams drive;
  double E_c = 0.0;
};

/// Derived parameters plus the drive, with V_p or n_c resolved into both
/// a source amplitude and a cavity energy.
Operating operating_point(const DerivedParams& d, const DriveBlock& b);

int run_derive(const RunConfig& rc, Artifacts& out);
int run_spectrum(const RunConfig& rc, Artifacts& out);
int run_sweep(const RunConfig& rc, Artifacts& out);
int run_optimize(const RunConfig& rc, Artifacts& out);
int run_simulate(const RunConfig& rc, const RunOptions& opt, Artifacts& out);
int run_compare(const RunConfig& rc, const RunOptions& opt, Artifacts& out);
int run_asymmetry(const RunConfig& rc, const RunOptions& opt, Artifacts& out);

}  // namespace optomech::cli
