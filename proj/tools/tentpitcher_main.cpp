#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "tentpitcher/io.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("TENTPITCHER_LOG_LEVEL");
  if (!env) return 1;
  const std::string s = env;
  if (s == "error") return 0;
  if (s == "debug") return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tentpitcher: spacetime meshing by tent pitching"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "build a spacetime mesh");
  std::string mesh_path, field_path, scale_path, out_path, log_path;
  std::string mode = "linear", heuristic = "global-min";
  tentpitcher::Config config;
  double epsilon = 0.5, phi_bar = -1.0, gamma = 0.5, delta = 1e-9;
  int horizon = 1, lookahead = 1;
  double target_time = 1.0;
  long budget = 1000000;
  unsigned long long seed = 0;
  bool lazy = false;
  double xi1 = std::numeric_limits<double>::infinity(), xi2 = 0.0;
  run->add_option("--mesh", mesh_path, "space mesh (.smesh)")->required();
  run->add_option("--field", field_path, "wavespeed field (JSON)")->required();
  run->add_option("--scale", scale_path, "target length-scale field (JSON)");
  run->add_option("--mode", mode, "linear|nonlocal|adaptive|unified|conform");
  run->add_option("--epsilon", epsilon, "progress parameter in (0,1)");
  run->add_option("--phi-bar", phi_bar,
                  "adaptive parameter in (epsilon,(1+epsilon)/2); default band midpoint");
  run->add_option("--gamma", gamma, "target-time parameter in (0,1/2]");
  run->add_option("--delta", delta, "sup-to-feasible back-off");
  run->add_option("--horizon", horizon, "lookahead horizon h");
  run->add_option("--lookahead", lookahead, "refinement lookahead l");
  run->add_option("--target-time", target_time, "target time T");
  run->add_option("--out", out_path, "VTK output path");
  run->add_option("--log", log_path, "JSONL event log path");
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--heuristic", heuristic,
                  "global-min|random-local-min|max-guarantee");
  run->add_option("--budget", budget, "step budget");
  run->add_flag("--lazy", lazy, "lazy refinement propagation");
  run->add_option("--xi1", xi1, "solver reject threshold");
  run->add_option("--xi2", xi2, "solver coarsenable threshold");

  // verify
  auto* verify = app.add_subcommand("verify", "replay and check a run");
  std::string vlog_path, mesh_out;
  verify->add_option("--log", vlog_path, "JSONL event log")->required();
  verify->add_option("--mesh-out", mesh_out, "write the replayed mesh here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      config.policy.mode = tentpitcher::PitchPolicy::parse_mode(mode);
      config.policy.params = tentpitcher::ConstraintParams::with_epsilon(epsilon);
      if (phi_bar > 0) config.policy.params.phi_bar = phi_bar;
      config.policy.params.gamma = gamma;
      config.policy.params.delta_margin = delta;
      config.policy.horizon = horizon;
      config.policy.lookahead = lookahead;
      config.policy.target_time = target_time;
      config.policy.step_budget = budget;
      config.policy.seed = seed;
      config.policy.lazy_propagation = lazy;
      config.policy.selection =
          heuristic == "random-local-min"
              ? tentpitcher::PitchPolicy::Selection::RandomLocalMin
          : heuristic == "max-guarantee"
              ? tentpitcher::PitchPolicy::Selection::MaxGuarantee
              : tentpitcher::PitchPolicy::Selection::GlobalMin;
      config.xi1 = xi1;
      config.xi2 = xi2;

      tentpitcher::SpaceMesh mesh = tentpitcher::load_mesh(mesh_path);
      if (mesh.dim == 2 && mesh.apex.empty()) mesh.assign_default_apexes();
      const auto check = tentpitcher::validate_complex(mesh);
      if (!check.ok()) {
        for (const auto& issue : check.issues)
          std::cerr << "mesh: " << issue.what << "\n";
        return 2;
      }
      const tentpitcher::WavespeedField field =
          tentpitcher::load_field(field_path);
      tentpitcher::MockSolver solver;
      if (!scale_path.empty())
        solver.target_scale = tentpitcher::load_field(scale_path);
      solver.xi1 = xi1;
      solver.xi2 = xi2;

      tentpitcher::Pitcher pitcher(mesh, field, solver, config.policy);
      const tentpitcher::RunResult result = pitcher.run();
      if (log_level() >= 1) {
        std::cout << "patches " << result.report.patches << " elements "
                  << result.report.elements << " min-aspect "
                  << result.report.min_aspect << " min-tentpole "
                  << result.report.min_tentpole << " count-bound "
                  << result.report.count_bound << " size-lower-bound "
                  << result.report.size_lower_bound << "\n";
      }
      if (!out_path.empty()) tentpitcher::write_vtk(result.mesh, out_path);
      if (!log_path.empty())
        tentpitcher::write_events(config, mesh, field, solver.target_scale,
                                  result.events, result.report, log_path);
      return 0;
    }

    const tentpitcher::EventLog log = tentpitcher::read_events(vlog_path);
    const tentpitcher::ValidationReport report =
        tentpitcher::verify_suite(log, mesh_out);
    for (const auto& issue : report.issues)
      std::cerr << "verify: " << issue.what << "\n";
    if (log_level() >= 1)
      std::cout << (report.ok() ? "verify: all checks passed"
                                : "verify: FAILED")
                << "\n";
    return report.ok() ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
