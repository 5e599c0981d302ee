#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "fwguide/analysis.hpp"
#include "fwguide/fw_oracle.hpp"
#include "fwguide/presets.hpp"
#include "fwguide/runner.hpp"
#include "fwguide/scenario.hpp"
#include "fwguide/trajectory_io.hpp"

namespace {

using namespace fwguide;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario lookup(const std::string& target) {
  if (!find_preset(target) && !std::filesystem::exists(target)) {
    throw UsageError("unknown preset or missing file '" + target + "' (see 'fwguide list')");
  }
  return resolve_scenario(target);
}

nlohmann::json to_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

void print_checks(const CertificateReport& report) {
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << format_double(c.value)
              << "  threshold=" << format_double(c.threshold) << "\n";
  }
}

int cmd_run(const std::string& target, const std::string& out, const RunOverrides& overrides) {
  const Scenario scenario = apply_overrides(lookup(target), overrides);
  const RunResult r = run(scenario, out.empty() ? default_output_dir() : std::filesystem::path(out));
  print_checks(r.report);
  if (r.trajectory.collided) {
    std::cout << "collision at t=" << format_double(*r.trajectory.collision_time) << "\n";
  }
  std::cout << "wrote " << r.csv_path.string() << "\n" << "wrote " << r.report_path.string() << "\n";
  return r.exit_code;
}

int cmd_batch(const std::string& pattern, const std::string& out, int jobs) {
  const auto scenarios = resolve_inputs(pattern);
  const BatchResult r =
      batch(scenarios, out.empty() ? default_output_dir() : std::filesystem::path(out), jobs);
  std::cout << batch_table(r);
  return r.exit_code;
}

int cmd_solve(const std::string& target) {
  const Scenario scenario = lookup(target);
  const BeaconSnapshot snap = scenario.field.snapshot(0.0);
  const ExistenceReport ex = existence_check(snap);
  const FwSolution sol = weiszfeld(snap);
  nlohmann::json j;
  j["solution"] = {{"point", to_json(sol.point)},
                   {"residual", sol.residual},
                   {"iterations", sol.iterations},
                   {"converged", sol.converged}};
  j["existence"] = {{"margins", ex.margins}, {"interior_minimum", ex.interior_minimum}};
  std::cout << j.dump(2) << "\n";
  return kExitPass;
}

int cmd_check(const std::string& csv, const std::string& target) {
  const Scenario scenario = lookup(target);
  Trajectory traj;
  try {
    traj = read_trajectory_csv(csv, scenario.law.kind);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(ConfigError::Kind::Parse, csv + ": " + e.what());
  }
  const AnalysisContext ctx = make_context(to_sim_config(scenario));
  attach_lyapunov(traj, ctx);
  const CertificateReport report = certify(traj, ctx, scenario.certificate);
  print_checks(report);
  return exit_code_for(traj, report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing-only guidance toward a moving Fermat-Weber point"};
  app.require_subcommand(1);

  std::string target, out, pattern, csv;
  std::optional<double> dt, horizon;
  std::optional<std::uint64_t> seed;
  int jobs = 1;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and certify it");
  run_cmd->add_option("scenario", target, "Preset name or scenario file")->required();
  run_cmd->add_option("--out", out, "Output directory (default $FWGUIDE_OUT_DIR or ./fwguide_out)");
  run_cmd->add_option("--dt", dt, "Integration step")->check(CLI::PositiveNumber);
  run_cmd->add_option("--horizon", horizon, "Final time")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "Seed for random initial positions");

  auto* batch_cmd = app.add_subcommand("batch", "Run every preset or file matching a glob");
  batch_cmd->add_option("pattern", pattern, "Preset-name glob or file glob")->required();
  batch_cmd->add_option("--jobs,-j", jobs, "Parallel scenarios")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--out", out, "Output directory");

  auto* solve_cmd = app.add_subcommand("solve", "Print the Fermat-Weber point at t=0");
  solve_cmd->add_option("scenario", target, "Preset name or scenario file")->required();

  auto* check_cmd = app.add_subcommand("check", "Re-run the analysis on a trajectory file");
  check_cmd->add_option("trajectory", csv, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--scenario", target, "Preset name or scenario file")->required();

  auto* list_cmd = app.add_subcommand("list", "List built-in presets");
  auto* show_cmd = app.add_subcommand("show", "Print a scenario with defaults filled in");
  show_cmd->add_option("scenario", target, "Preset name or scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(target, out, {dt, horizon, seed});
    if (*batch_cmd) return cmd_batch(pattern, out, jobs);
    if (*solve_cmd) return cmd_solve(target);
    if (*check_cmd) return cmd_check(csv, target);
    if (*list_cmd) {
      for (const auto& n : preset_names()) std::cout << n << "\n";
      return kExitPass;
    }
    if (*show_cmd) {
      std::cout << dump_scenario(lookup(target));
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitConfigError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitUsage;
}
