#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fwguide/analysis.hpp"
#include "fwguide/scenario.hpp"
#include "fwguide/world.hpp"

namespace fwguide {

// Process exit codes shared by run, batch and check.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCertificateFailure = 2;
inline constexpr int kExitCollision = 3;
inline constexpr int kExitConfigError = 4;

/// Output directory from FWGUIDE_OUT_DIR, else "fwguide_out".
std::filesystem::path default_output_dir();

struct RunOverrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
};

/// Applies overrides and re-validates. Throws ConfigError.
Scenario apply_overrides(Scenario scenario, const RunOverrides& overrides);

struct RunResult {
  std::string name;
  Trajectory trajectory;
  CertificateReport report;
  int exit_code = kExitPass;
  std::filesystem::path csv_path;
  std::filesystem::path report_path;
};

/// Simulates, attaches V and certifies. Writes <out_dir>/<name>/trajectory.csv
/// and report.json when out_dir is non-empty.
RunResult run(const Scenario& scenario, const std::filesystem::path& out_dir = {});

int exit_code_for(const Trajectory& traj, const CertificateReport& report);

/// Preset name or scenario file path. Throws ConfigError.
Scenario resolve_scenario(const std::string& name_or_path);

/// Presets whose names match the glob, plus scenario files matching it,
/// sorted by scenario name.
std::vector<Scenario> resolve_inputs(const std::string& pattern);

struct BatchEntry {
  std::string name;
  int exit_code = kExitPass;
  bool passed = false;
  double final_delta_norm = 0.0;
  std::string error;
};

struct BatchResult {
  std::vector<BatchEntry> entries;  // sorted by name
  int exit_code = kExitPass;
};

/// Runs the scenarios on up to `jobs` threads. Each scenario writes only
/// into its own subdirectory; results do not depend on `jobs`.
BatchResult batch(const std::vector<Scenario>& scenarios, const std::filesystem::path& out_dir,
                  int jobs);

std::string batch_table(const BatchResult& result);

}  // namespace fwguide
