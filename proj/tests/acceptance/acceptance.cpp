#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fwguide/analysis.hpp"
#include "fwguide/fw_oracle.hpp"
#include "fwguide/presets.hpp"
#include "fwguide/runner.hpp"
#include "fwguide/trajectory_io.hpp"
#include "oracles.hpp"

using namespace fwguide;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec at(const Trajectory& t, double time, bool velocity = false) {
  for (const auto& s : t.samples) {
    if (s.t >= time - 1e-9) return velocity ? *s.v : s.p;
  }
  return velocity ? *t.samples.back().v : t.samples.back().p;
}

double delta_at(const Trajectory& t, const AnalysisContext& ctx, double time) {
  return (at(t, time) - ctx.optimum_at(time)).norm();
}

struct Run {
  Scenario scenario;
  AnalysisContext ctx;
  Trajectory traj;
  CertificateReport report;
};

Run simulate_scenario(const Scenario& s) {
  const SimConfig cfg = to_sim_config(s);
  Run r{s, make_context(cfg), simulate(cfg), {}};
  attach_lyapunov(r.traj, r.ctx);
  r.report = certify(r.traj, r.ctx, s.certificate);
  return r;
}

Scenario with_seed(Scenario s, std::uint64_t seed) {
  s.seed = seed;
  return s;
}

Scenario ball_start(Scenario s, std::uint64_t seed) {
  s.initial = InitialPosition{InitialPosition::Kind::RandomBall, {}, {}, {}};
  s.seed = seed;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome oracle_agreement() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  double worst_gap = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 6;
    const int d = 2 + trial % 2;
    const BeaconSnapshot field = fwguide::testing::random_field(rng, n, d);
    const FwSolution w = weiszfeld(field);
    const FwSolution b = brute_force(field, bounding_box(field, 0.5), d == 2 ? 0.05 : 0.2, 30);
    worst_gap = std::max(worst_gap, (w.point - b.point).norm());
    worst_res = std::max(worst_res, w.residual);
  }
  o.require(worst_gap <= 1e-5, "max |weiszfeld - brute| = " + num(worst_gap) + " <= 1e-5");
  o.require(worst_res <= 1e-8, "max residual = " + num(worst_res) + " <= 1e-8");
  const double hex = weiszfeld(hexagon_field().snapshot(0.0)).point.norm();
  const double cube = weiszfeld(cube_field().snapshot(0.0)).point.norm();
  o.require(hex <= 1e-9, "hexagon |p*| = " + num(hex));
  o.require(cube <= 1e-9, "cube |p*| = " + num(cube));
  return o;
}

Outcome derivative_checks() {
  Outcome o;
  std::mt19937_64 rng(77);
  double g_err = 0.0, h_err = 0.0;
  int points = 0;
  while (points < 100) {
    const int d = 2 + points % 2;
    const BeaconSnapshot field = fwguide::testing::random_field(rng, 3 + points % 6, d);
    const Vec p = fwguide::testing::random_point(rng, d);
    if (min_distance(p, field) < 0.1) continue;
    const Vec fd = fwguide::testing::fd_gradient([&](const Vec& x) { return objective(x, field); }, p);
    const Mat fh = fwguide::testing::fd_jacobian([&](const Vec& x) { return grad_f(x, field); }, p);
    g_err = std::max(g_err, (grad_f(p, field) - fd).cwiseAbs().maxCoeff());
    h_err = std::max(h_err, (hessian_f(p, field) - fh).cwiseAbs().maxCoeff());
    ++points;
  }
  o.require(g_err <= 1e-6, "gradient max err " + num(g_err) + " <= 1e-6");
  o.require(h_err <= 1e-5, "hessian max err " + num(h_err) + " <= 1e-5");
  return o;
}

Outcome gradient_reproduction() {
  Outcome o;
  double worst_final = 0.0, worst_inc = 0.0, worst_env = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Run r = simulate_scenario(with_seed(preset("sim1a-gradient"), seed));
    worst_final = std::max(worst_final, delta_at(r.traj, r.ctx, 30.0));
    worst_inc = std::max(worst_inc, monotone_check(r.traj, 1e-9).max_increase);
    worst_env = std::max(worst_env, exponential_envelope_ratio(r.traj, r.ctx, 0.05));
    o.pass = o.pass && !r.traj.collided;
  }
  o.require(worst_final <= 1e-3, "max |delta(30)| = " + num(worst_final) + " <= 1e-3");
  o.require(worst_inc <= 1e-9, "max increase of |delta|^2/2 = " + num(worst_inc) + " <= 1e-9");
  o.require(worst_env <= 1.0, "envelope ratio " + num(worst_env) + " <= 1");
  return o;
}

Outcome noisy_bound() {
  Outcome o;
  const Run noisy = simulate_scenario(preset("sim1a-noisy"));
  std::vector<double> times;
  for (const auto& s : noisy.traj.samples) times.push_back(s.t);
  const NoisyBound b = noisy_ultimate_bound(noisy.ctx, times, 0.5);
  double observed = 0.0;
  for (const auto& s : noisy.traj.samples) {
    if (s.t >= 10.0) observed = std::max(observed, s.delta_norm);
  }
  o.require(ultimate_bound_check(noisy.traj, b.bound, 10.0),
            "max |delta| after 10 s = " + num(observed) + " <= bound " + num(b.bound));

  Scenario clean = preset("sim1a-noisy");
  for (auto& a : clean.noise.angles) a = AngleSignal{};
  const Run c = simulate_scenario(clean);
  const NoisyBound b0 = noisy_ultimate_bound(c.ctx, times, 0.5);
  double observed0 = 0.0;
  for (const auto& s : c.traj.samples) {
    if (s.t >= 10.0) observed0 = std::max(observed0, s.delta_norm);
  }
  o.require(b0.bound == 0.0 && ultimate_bound_check(c.traj, std::max(b0.bound, 1e-3), 10.0),
            "theta=0: bound " + num(b0.bound) + ", max |delta| after 10 s = " + num(observed0) +
                " <= 1e-3");
  return o;
}

Outcome finite_time() {
  Outcome o;
  const Run ft = simulate_scenario(preset("sim1a-finite"));
  const FiniteTimeCheck chk = finite_time_check(ft.traj, ft.ctx, 1e-6);
  const double d0 = ft.traj.samples.front().delta_norm;
  o.require(d0 < ft.ctx.ball_radius(), "start inside ball (" + num(d0) + ")");
  o.require(chk.settling.has_value(), "settles to 1e-6");
  o.require(chk.within_bound, "settling " + num(chk.settling.value_or(-1)) + " <= T " + num(chk.bound.T));

  Scenario paired = preset("sim1a-finite");
  paired.law = ControlLaw{LawKind::Gradient, {}};
  paired.initial = InitialPosition{InitialPosition::Kind::Explicit, ft.traj.samples.front().p, {}, {}};
  const Run gr = simulate_scenario(paired);
  const auto ts = settling_time(gr.traj, 1e-6);
  o.require(chk.settling && ts && *chk.settling < *ts,
            "paired gradient settling " + num(ts.value_or(-1)) + " > " + num(chk.settling.value_or(-1)));
  return o;
}

Outcome adaptive_si() {
  Outcome o;
  double worst_d = 0.0, worst_v = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Run r = simulate_scenario(with_seed(preset("sim1b"), seed));
    worst_d = std::max(worst_d, delta_at(r.traj, r.ctx, 10.0));
    const auto& last = r.traj.samples.back();
    worst_v = std::max(worst_v, (*last.controller.v_hat - r.ctx.field.motion.velocity_at(last.t)).norm());
  }
  o.require(worst_d <= 5e-2, "max |delta(10)| = " + num(worst_d) + " <= 5e-2");
  o.require(worst_v <= 5e-2, "max |vhat(10) - v*| = " + num(worst_v) + " <= 5e-2");
  return o;
}

Outcome sliding_si() {
  Outcome o;
  const Run r = simulate_scenario(preset("sim1c-smc"));
  const double d = delta_at(r.traj, r.ctx, 10.0);
  const MonotoneResult m = monotone_outside_layer(r.traj, r.ctx, 1e-6);
  o.require(d <= 5e-2, "|delta(10)| = " + num(d) + " <= 5e-2");
  o.require(m.intervals > 0, num(static_cast<double>(m.intervals)) + " intervals outside the layer");
  o.require(m.monotone, "max V increase " + num(m.max_increase) + " within 1e-6/step");
  return o;
}

Outcome adaptive_sliding_si() {
  Outcome o;
  const Run r = simulate_scenario(preset("sim1c-adaptive"));
  double worst = 0.0, bmin = 1e300, bmax = -1e300;
  for (const auto& s : r.traj.samples) {
    if (s.t >= 8.0) worst = std::max(worst, s.delta_norm);
    bmin = std::min(bmin, *s.controller.beta);
    bmax = std::max(bmax, *s.controller.beta);
  }
  o.require(worst <= 0.2, "max |delta| after 8 s = " + num(worst) + " <= 0.2");
  o.require(bmin >= 0.0, "min beta " + num(bmin) + " >= 0");
  o.require(std::isfinite(bmax), "max beta " + num(bmax) + " finite");
  return o;
}

Outcome double_integrators() {
  Outcome o;
  const Run a = simulate_scenario(preset("sim2a"));
  const double da = delta_at(a.traj, a.ctx, 15.0);
  o.require(da <= 1e-2, "2a |delta(15)| = " + num(da) + " <= 1e-2");

  const Run b = simulate_scenario(preset("sim2b"));
  const double db = delta_at(b.traj, b.ctx, 25.0);
  const double vb = (at(b.traj, 25.0, true) - b.ctx.field.motion.velocity_at(25.0)).norm();
  o.require(db <= 5e-2, "2b |delta(25)| = " + num(db) + " <= 5e-2");
  o.require(vb <= 5e-2, "2b |v - v*| = " + num(vb) + " <= 5e-2");

  const Run c = simulate_scenario(preset("sim2c"));
  double profile_err = 0.0;
  for (double t = 0.0; t <= 25.0; t += 0.5) {
    Vec expect(3);
    expect << std::sin(t / 2), 1.0, 0.0;
    profile_err = std::max(profile_err, (c.ctx.field.motion.velocity_at(t) - expect).norm());
  }
  const double dc = delta_at(c.traj, c.ctx, 25.0);
  o.require(profile_err <= 1e-15, "2c v*(t) = [sin(t/2), 1, 0]");
  o.require(dc <= 5e-2, "2c |delta(25)| = " + num(dc) + " <= 5e-2");
  return o;
}

Outcome collision_avoidance() {
  Outcome o;
  const char* single[] = {"sim1a-gradient", "sim1a-noisy", "sim1a-finite",
                          "sim1b",          "sim1c-smc",   "sim1c-adaptive"};
  for (const char* name : single) {
    double closest = 1e300;
    bool collided = false;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Scenario s = ball_start(preset(name), seed);
      const SimConfig cfg = to_sim_config(s);
      const Trajectory t = simulate(cfg);
      collided = collided || t.collided;
      for (const auto& sm : t.samples) closest = std::min(closest, sm.min_dist);
    }
    o.require(!collided && closest > preset(name).eps_guard,
              std::string(name) + " min d_i " + num(closest));
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("fwguide_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::vector<Scenario> all;
  for (const auto& n : preset_names()) all.push_back(preset(n));
  int identical = 0;
  for (const auto& s : all) {
    const std::string a = slurp(run(s, base / "first").csv_path);
    const std::string b = slurp(run(s, base / "second").csv_path);
    identical += (a == b && !a.empty());
  }
  o.require(identical == static_cast<int>(all.size()),
            std::to_string(identical) + "/" + std::to_string(all.size()) + " presets repeat byte-identically");
  batch(all, base / "jobs1", 1);
  batch(all, base / "jobs4", 4);
  int same = 0;
  for (const auto& s : all) {
    same += slurp(base / "jobs1" / s.name / "trajectory.csv") ==
            slurp(base / "first" / s.name / "trajectory.csv") &&
            slurp(base / "jobs4" / s.name / "trajectory.csv") ==
            slurp(base / "first" / s.name / "trajectory.csv");
  }
  o.require(same == static_cast<int>(all.size()),
            std::to_string(same) + "/" + std::to_string(all.size()) + " identical under batch jobs 1 and 4");
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle agreement", oracle_agreement},
      {"derivative checks", derivative_checks},
      {"gradient law convergence", gradient_reproduction},
      {"rotated-bearing ultimate bound", noisy_bound},
      {"finite-time settling", finite_time},
      {"adaptive constant-velocity tracking", adaptive_si},
      {"sliding-mode tracking", sliding_si},
      {"adaptive sliding-mode tracking", adaptive_sliding_si},
      {"double-integrator laws", double_integrators},
      {"collision avoidance", collision_avoidance},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
