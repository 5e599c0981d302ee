#include "fwguide/trajectory_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace fwguide {

namespace {

bool has_beta(const Trajectory& t) { return t.law == LawKind::AdaptiveSmcSI; }
bool has_v_hat(const Trajectory& t) {
  return t.law == LawKind::AdaptiveConstVelSI || t.law == LawKind::AdaptiveConstVelDI;
}
bool has_q(const Trajectory& t) { return t.law == LawKind::SmcDI; }

void append_vec_names(std::string& h, const char* prefix, int d) {
  for (int k = 0; k < d; ++k) {
    h += ',';
    h += prefix;
    h += std::to_string(k);
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number '" + s + "' in trajectory CSV");
  }
  return x;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string csv_header(const Trajectory& traj) {
  const int d = traj.dim;
  std::string h = "t";
  append_vec_names(h, "p", d);
  if (traj.model == AgentModel::DoubleIntegrator) append_vec_names(h, "v", d);
  append_vec_names(h, "u", d);
  h += ",delta_norm,f,V,min_dist";
  if (has_beta(traj)) h += ",beta";
  if (has_v_hat(traj)) append_vec_names(h, "vhat", d);
  if (has_q(traj)) append_vec_names(h, "q", d);
  return h;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  std::string line = csv_header(traj);
  line += '\n';
  out << line;
  auto put = [&line](double x) {
    line += ',';
    line += format_double(x);
  };
  auto put_vec = [&put](const Vec& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) put(v[k]);
  };
  for (const auto& s : traj.samples) {
    line = format_double(s.t);
    put_vec(s.p);
    if (traj.model == AgentModel::DoubleIntegrator) put_vec(*s.v);
    put_vec(s.u);
    put(s.delta_norm);
    put(s.f);
    put(s.V);
    put(s.min_dist);
    if (has_beta(traj)) put(*s.controller.beta);
    if (has_v_hat(traj)) put_vec(*s.controller.v_hat);
    if (has_q(traj)) put_vec(*s.controller.q);
    line += '\n';
    out << line;
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, LawKind law) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  const std::vector<std::string> cols = split(line);

  Trajectory traj;
  traj.law = law;
  traj.dim = 0;
  bool has_v = false;
  for (const auto& c : cols) {
    if (c.size() >= 2 && c[0] == 'p' && std::isdigit(static_cast<unsigned char>(c[1]))) ++traj.dim;
    if (c == "v0") has_v = true;
  }
  if (traj.dim < 1 || traj.dim > kMaxDim) {
    throw std::runtime_error(path.string() + ": cannot infer dimension from header");
  }
  traj.model = has_v ? AgentModel::DoubleIntegrator : AgentModel::SingleIntegrator;
  if (csv_header(traj) != line) {
    throw std::runtime_error(path.string() + ": header does not match law " +
                             std::string(to_string(law)));
  }
  const int d = traj.dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != cols.size()) throw std::runtime_error(path.string() + ": ragged row");
    std::size_t i = 0;
    auto next = [&] { return parse_double(cells[i++]); };
    auto next_vec = [&] {
      Vec v(d);
      for (int k = 0; k < d; ++k) v[k] = next();
      return v;
    };
    TrajectorySample s;
    s.t = next();
    s.p = next_vec();
    if (has_v) s.v = next_vec();
    s.u = next_vec();
    s.delta_norm = next();
    s.f = next();
    s.V = next();
    s.min_dist = next();
    if (has_beta(traj)) s.controller.beta = next();
    if (has_v_hat(traj)) s.controller.v_hat = next_vec();
    if (has_q(traj)) s.controller.q = next_vec();
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

std::string report_json(const std::string& scenario_name, const Trajectory& traj,
                        const CertificateReport& report) {
  using nlohmann::json;
  json j;
  j["scenario"] = scenario_name;
  j["law"] = std::string(to_string(report.law));
  j["lyapunov"] = std::string(to_string(report.lyapunov));
  j["passed"] = report.passed();
  j["collision_free"] = report.collision_free;
  j["collision_time"] = traj.collision_time ? json(*traj.collision_time) : json(nullptr);
  j["min_distance"] = report.min_distance;
  j["monotone"] = report.monotone;
  j["max_lyapunov_increase"] = report.max_increase;
  j["fitted_rate"] = report.fitted_rate;
  j["settling_time"] = report.settling_time ? json(*report.settling_time) : json(nullptr);
  j["ultimate_bound"] = report.ultimate_bound_observed;
  if (!traj.samples.empty()) {
    j["final_time"] = traj.samples.back().t;
    j["final_delta_norm"] = traj.samples.back().delta_norm;
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  }
  j["checks"] = checks;
  if (!report.beta_trace.empty()) {
    // Decimated to at most ~100 points; the CSV carries the full adaptive trace.
    const std::size_t stride = std::max<std::size_t>(1, report.beta_trace.size() / 100);
    json trace = json::array();
    for (std::size_t i = 0; i < report.beta_trace.size(); i += stride) {
      trace.push_back({report.beta_trace[i].first, report.beta_trace[i].second});
    }
    j["beta_trace"] = trace;
  }
  return j.dump(2) + "\n";
}

}  // namespace fwguide
