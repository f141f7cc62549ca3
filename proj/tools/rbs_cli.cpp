#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rbs/app/config.hpp"
#include "rbs/app/harness.hpp"
#include "rbs/app/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 2;
constexpr int kSolverFailure = 3;

int run(const std::string& config_path, const std::string& out, bool dump, bool profile) {
  const auto cfg = rbs::app::load_config(config_path);
  rbs::app::RunOptions opts;
  opts.out_dir = out;
  opts.dump_surfaces = dump;
  opts.profile = profile;
  const auto result = rbs::app::run_scenario(cfg, opts);
  std::cout << "completed " << result.steps << " steps, t = " << result.t << "\n";
  std::cout << "trajectory: " << (std::filesystem::path(out) / cfg.output.trajectory).string() << "\n";
  if (result.condition_number) std::cout << "condition number at t=0: " << *result.condition_number << "\n";
  if (profile || cfg.output.profile) std::cout << result.profile.to_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid-body Stokes mobility simulator"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario described by a JSON configuration");
  std::string config_path, out_dir = "out";
  bool dump = false, profile = false;
  run_cmd->add_option("config", config_path, "Scenario configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--dump-surfaces", dump, "Write VTK surface frames");
  run_cmd->add_flag("--profile", profile, "Write per-stage timings");

  auto* conv_cmd = app.add_subcommand("converge", "Swimmer self-convergence table");
  std::string kind = "spatial", scheme = "rk4", shape = "sphere", conv_out;
  bool no_torques = false;
  conv_cmd->add_option("--kind", kind, "spatial or temporal")->check(CLI::IsMember({"spatial", "temporal"}));
  conv_cmd->add_option("--scheme", scheme, "euler, heun or rk4")->check(CLI::IsMember({"euler", "heun", "rk4"}));
  conv_cmd->add_option("--shape", shape, "sphere or ellipsoid-<a>");
  conv_cmd->add_flag("--no-torques", no_torques, "Drive the swimmer with forces only");
  conv_cmd->add_option("--csv", conv_out, "Write the table to this file");

  auto* scale_cmd = app.add_subcommand("scale", "Per-stage timings on sphere lattices");
  std::vector<int> ns{8, 16}, ps{8};
  std::string scale_out;
  rbs::app::ScalingOptions scale_opts;
  scale_cmd->add_option("--n", ns, "Body counts")->delimiter(',');
  scale_cmd->add_option("--p", ps, "Degrees")->delimiter(',');
  scale_cmd->add_option("--steps", scale_opts.steps, "Time steps per run");
  scale_cmd->add_option("--spacing", scale_opts.spacing, "Lattice spacing");
  scale_cmd->add_option("--csv", scale_out, "Write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*run_cmd) return run(config_path, out_dir, dump, profile);
    if (*conv_cmd) {
      rbs::app::ConvergenceOptions opts;
      opts.torques = !no_torques;
      const auto table = rbs::app::convergence_harness(rbs::app::parse_convergence_kind(kind),
                                                       rbs::dynamics::parse_scheme(scheme), shape, opts);
      std::cout << table.to_csv();
      if (!conv_out.empty()) std::ofstream(conv_out) << table.to_csv();
      return kOk;
    }
    if (*scale_cmd) {
      const auto rows = rbs::app::scaling_harness(ns, ps, scale_opts);
      std::cout << rbs::app::scaling_csv(rows);
      if (!scale_out.empty()) std::ofstream(scale_out) << rbs::app::scaling_csv(rows);
      return kOk;
    }
  } catch (const rbs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const rbs::app::SimulationError& e) {
    std::cerr << "simulation failed: " << e.what() << "\n";
    return e.solver_failure ? kSolverFailure : 1;
  } catch (const rbs::NonConvergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const rbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
