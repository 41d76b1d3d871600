#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "optomech/errors.hpp"
#include "tasks.hpp"

using namespace optomech;
using namespace optomech::cli;

namespace {

// Parameter invariants are reported like config errors; everything the model
// itself rejects is a domain error.
int exit_for(Errc code) {
  switch (code) {
    case Errc::NonPositiveElement:
    case Errc::InvalidParameter:
    case Errc::InconsistentTopology:
    case Errc::InvalidDrive:
    case Errc::UnsupportedScheme:
    case Errc::InvalidSimConfig:
      return exit_config;
    case Errc::IoError:
      return 1;
    default:
      return exit_domain;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electromechanical back-action and sideband analysis"};
  std::string task_arg, config_path, out_dir;
  std::uint64_t seed = 0;
  bool allow_instability = false;
  app.add_option("task", task_arg, "derive | spectrum | sweep | simulate | compare | optimize | asymmetry")
      ->required();
  app.add_option("--config,-c", config_path, "run configuration file")->required();
  auto* out_opt = app.add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "base seed (overrides the config)");
  app.add_flag("--allow-instability", allow_instability, "exit 0 when a simulation runs away");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  const auto task = task_from_name(task_arg);
  if (!task) {
    std::fprintf(stderr, "optomech: unknown task '%s'\n", task_arg.c_str());
    return exit_config;
  }
  try {
    RunConfig rc = load_run_config(config_path, *task);
    if (*out_opt) rc.out_dir = out_dir;
    if (*seed_opt) rc.seed = seed;
    Artifacts out(rc.out_dir, rc.formats);
    const int code = run_task(rc, {allow_instability}, out);
    out.write_manifest(rc);
    if (code == exit_instability) std::fprintf(stderr, "optomech: simulation became unstable\n");
    return code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "optomech: config error: %s\n", e.what());
    return exit_config;
  } catch (const Error& e) {
    std::fprintf(stderr, "optomech: %s\n", e.what());
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "optomech: %s\n", e.what());
    return 1;
  }
}
