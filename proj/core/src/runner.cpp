#include "fwguide/runner.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fnmatch.h>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fwguide/presets.hpp"
#include "fwguide/trajectory_io.hpp"

namespace fwguide {

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("FWGUIDE_OUT_DIR"); env && *env) return env;
  return "fwguide_out";
}

Scenario apply_overrides(Scenario scenario, const RunOverrides& overrides) {
  if (overrides.dt) scenario.dt = *overrides.dt;
  if (overrides.horizon) scenario.horizon = *overrides.horizon;
  if (overrides.seed) scenario.seed = *overrides.seed;
  validate(scenario);
  return scenario;
}

int exit_code_for(const Trajectory& traj, const CertificateReport& report) {
  if (traj.collided) return kExitCollision;
  return report.passed() ? kExitPass : kExitCertificateFailure;
}

RunResult run(const Scenario& scenario, const std::filesystem::path& out_dir) {
  const SimConfig config = to_sim_config(scenario);
  const AnalysisContext ctx = make_context(config);

  RunResult result;
  result.name = scenario.name;
  result.trajectory = simulate(config);
  attach_lyapunov(result.trajectory, ctx);
  result.report = certify(result.trajectory, ctx, scenario.certificate);
  result.exit_code = exit_code_for(result.trajectory, result.report);

  if (!out_dir.empty()) {
    const std::filesystem::path dir = out_dir / scenario.name;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw ConfigError(ConfigError::Kind::Io, "cannot create " + dir.string() + ": " + ec.message());
    }
    result.csv_path = dir / "trajectory.csv";
    result.report_path = dir / "report.json";
    try {
      write_trajectory_csv(result.csv_path, result.trajectory);
    } catch (const std::runtime_error& e) {
      throw ConfigError(ConfigError::Kind::Io, e.what());
    }
    std::ofstream rep(result.report_path, std::ios::binary);
    rep << report_json(scenario.name, result.trajectory, result.report);
    if (!rep) throw ConfigError(ConfigError::Kind::Io, "cannot write " + result.report_path.string());
  }
  return result;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto s = find_preset(name_or_path)) return *s;
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw ConfigError(ConfigError::Kind::Io,
                    "'" + name_or_path + "' is neither a preset nor a scenario file");
}

std::vector<Scenario> resolve_inputs(const std::string& pattern) {
  std::vector<Scenario> out;
  for (const auto& name : preset_names()) {
    if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) out.push_back(preset(name));
  }
  glob_t g{};
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) {
      const std::filesystem::path p = g.gl_pathv[i];
      if (std::filesystem::is_regular_file(p)) out.push_back(load_scenario(p));
    }
  }
  globfree(&g);
  std::stable_sort(out.begin(), out.end(),
                   [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
  return out;
}

BatchResult batch(const std::vector<Scenario>& scenarios, const std::filesystem::path& out_dir,
                  int jobs) {
  BatchResult result;
  result.entries.resize(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      BatchEntry& e = result.entries[i];
      e.name = scenarios[i].name;
      try {
        const RunResult r = run(scenarios[i], out_dir);
        e.exit_code = r.exit_code;
        e.passed = r.report.passed() && !r.trajectory.collided;
        e.final_delta_norm =
            r.trajectory.samples.empty() ? 0.0 : r.trajectory.samples.back().delta_norm;
      } catch (const std::exception& ex) {
        e.exit_code = kExitConfigError;
        e.error = ex.what();
      }
    }
  };
  const int n = std::clamp<int>(jobs, 1, std::max<int>(1, static_cast<int>(scenarios.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  std::stable_sort(result.entries.begin(), result.entries.end(),
                   [](const BatchEntry& a, const BatchEntry& b) { return a.name < b.name; });
  for (const auto& e : result.entries) result.exit_code = std::max(result.exit_code, e.exit_code);

  if (!out_dir.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : result.entries) {
      j.push_back({{"name", e.name}, {"exit_code", e.exit_code}, {"passed", e.passed},
                   {"final_delta_norm", e.final_delta_norm}, {"error", e.error}});
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "batch_report.json", std::ios::binary) << j.dump(2) << "\n";
  }
  return result;
}

std::string batch_table(const BatchResult& result) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "scenario" << std::setw(8) << "result" << std::setw(6)
      << "exit" << "final |delta|\n";
  for (const auto& e : result.entries) {
    out << std::left << std::setw(18) << e.name << std::setw(8) << (e.passed ? "PASS" : "FAIL")
        << std::setw(6) << e.exit_code << format_double(e.final_delta_norm);
    if (!e.error.empty()) out << "  (" << e.error << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace fwguide
