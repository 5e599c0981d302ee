#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fwguide/analysis.hpp"
#include "fwguide/world.hpp"

namespace fwguide {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// t,p0..,[v0..,]u0..,delta_norm,f,V,min_dist[,beta][,vhat0..][,q0..]
std::string csv_header(const Trajectory& traj);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Reads a file written by write_trajectory_csv. The law is taken from
/// `law` because the file does not record it. Throws std::runtime_error.
Trajectory read_trajectory_csv(const std::filesystem::path& path, LawKind law);

/// Summary document for one run, as pretty-printed JSON.
std::string report_json(const std::string& scenario_name, const Trajectory& traj,
                        const CertificateReport& report);

}  // namespace fwguide
