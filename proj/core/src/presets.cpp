#include "fwguide/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fwguide {

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

InitialPosition random_box(const Vec& lower, const Vec& upper) {
  InitialPosition ip;
  ip.kind = InitialPosition::Kind::RandomBox;
  ip.lower = lower;
  ip.upper = upper;
  return ip;
}

InitialPosition random_ball() {
  InitialPosition ip;
  ip.kind = InitialPosition::Kind::RandomBall;
  return ip;
}

InitialPosition explicit_point(const Vec& p) {
  InitialPosition ip;
  ip.kind = InitialPosition::Kind::Explicit;
  ip.point = p;
  return ip;
}

Scenario planar(std::string name, LawKind kind) {
  Scenario s;
  s.name = std::move(name);
  s.dimension = 2;
  s.field = hexagon_field();
  s.model = AgentModel::SingleIntegrator;
  s.law.kind = kind;
  s.initial = random_box(v2(-3, -3), v2(3, 3));
  s.horizon = 10.0;
  return s;
}

Scenario spatial(std::string name, LawKind kind) {
  Scenario s;
  s.name = std::move(name);
  s.dimension = 3;
  s.field = cube_field();
  s.model = AgentModel::DoubleIntegrator;
  s.law.kind = kind;
  s.initial = random_box(v3(-4, -4, -4), v3(4, 4, 4));
  return s;
}

Scenario sim1a_gradient() {
  Scenario s = planar("sim1a-gradient", LawKind::Gradient);
  s.horizon = 30.0;
  s.certificate.delta_tol = 1e-3;
  return s;
}

Scenario sim1a_noisy() {
  Scenario s = planar("sim1a-noisy", LawKind::Gradient);
  s.horizon = 30.0;
  s.initial = random_ball();
  const AngleSignal third{AngleSignal::Kind::Constant, std::numbers::pi / 3.0, 0.0};
  const AngleSignal sine{AngleSignal::Kind::Sine, 1.0, 1.0};
  const AngleSignal big_sine{AngleSignal::Kind::Sine, 1.25, 1.0};
  s.noise.angles = {third, sine, big_sine, third, sine, big_sine};
  s.certificate.after = 10.0;
  return s;
}

Scenario sim1a_finite() {
  Scenario s = planar("sim1a-finite", LawKind::FiniteTime);
  s.law.gains.a = 0.3;
  s.initial = random_ball();
  // sig^a is not Lipschitz at the optimum: a fixed step dt leaves a residual
  // oscillation of order dt^(1/(1-a)), so this run needs a finer step.
  s.dt = 1e-5;
  s.record_stride = 1000;
  s.horizon = 30.0;
  s.certificate.settle_tol = 1e-6;
  return s;
}

Scenario sim1b() {
  Scenario s = planar("sim1b", LawKind::AdaptiveConstVelSI);
  s.field.motion = MotionProfile::constant(v2(0.5, 0.8), 0.8);
  s.law.gains.k = 1.0;
  return s;
}

MotionProfile sim1c_motion() {
  const double r = 1.0 / std::numbers::sqrt2;
  return MotionProfile::sinusoid(v2(r, r), v2(-r, r), 2.0, v2(0, 0), std::numbers::sqrt2);
}

Scenario sim1c_smc() {
  Scenario s = planar("sim1c-smc", LawKind::SmcKnownBoundSI);
  s.field.motion = sim1c_motion();
  s.law.gains.k = 1.0;
  s.law.gains.beta = 2.0;
  s.law.gains.phi = 1e-3;
  return s;
}

Scenario sim1c_adaptive() {
  Scenario s = planar("sim1c-adaptive", LawKind::AdaptiveSmcSI);
  s.field.motion = sim1c_motion();
  s.initial = random_ball();
  s.law.gains.k = 1.0;
  s.law.gains.k_beta = 2.0;
  s.law.gains.tau_beta = 0.1;
  s.law.gains.beta = 1.0;
  s.law.gains.phi = 1e-3;
  s.certificate.delta_tol = 0.2;
  s.certificate.after = 8.0;
  return s;
}

Scenario sim2a() {
  Scenario s = spatial("sim2a", LawKind::PdDI);
  s.law.gains.k = 1.0;
  s.horizon = 15.0;
  s.certificate.delta_tol = 1e-2;
  return s;
}

Scenario sim2b() {
  Scenario s = spatial("sim2b", LawKind::AdaptiveConstVelDI);
  s.field.motion = MotionProfile::constant(v3(0.5, 0.3, 0.4), 0.5);
  s.law.gains.k1 = 1.0;
  s.law.gains.k2 = 1.0;
  s.initial = explicit_point(v3(5, 5, -3));
  s.horizon = 25.0;
  return s;
}

Scenario sim2c() {
  Scenario s = spatial("sim2c", LawKind::SmcDI);
  s.field.motion = MotionProfile::sinusoid(v3(0, 1, 0), v3(1, 0, 0), 0.5, v3(0, 0, 0), 1.0);
  s.law.gains.beta = 1.0;
  s.law.gains.phi = 1e-3;
  s.initial = explicit_point(v3(5, 5, -3));
  s.horizon = 25.0;
  return s;
}

struct Entry {
  std::string_view name;
  Scenario (*make)();
};

constexpr Entry kPresets[] = {
    {"sim1a-finite", sim1a_finite}, {"sim1a-gradient", sim1a_gradient},
    {"sim1a-noisy", sim1a_noisy},   {"sim1b", sim1b},
    {"sim1c-adaptive", sim1c_adaptive}, {"sim1c-smc", sim1c_smc},
    {"sim2a", sim2a},               {"sim2b", sim2b},
    {"sim2c", sim2c},
};

}  // namespace

BeaconField hexagon_field() {
  BeaconField f;
  f.initial_positions = {v2(1, 1), v2(0, 2), v2(-1, 1), v2(-1, -1), v2(0, -2), v2(1, -1)};
  f.weights.assign(6, 1.0);
  f.motion = MotionProfile::stationary(2);
  return f;
}

BeaconField cube_field() {
  BeaconField f;
  for (int x : {-1, 1}) {
    for (int y : {-1, 1}) {
      for (int z : {-1, 1}) f.initial_positions.push_back(v3(x, y, z));
    }
  }
  f.weights.assign(8, 1.0);
  f.motion = MotionProfile::stationary(3);
  return f;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& e : kPresets) names.emplace_back(e.name);
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<Scenario> find_preset(std::string_view name) {
  for (const auto& e : kPresets) {
    if (e.name == name) return e.make();
  }
  return std::nullopt;
}

Scenario preset(std::string_view name) {
  if (auto s = find_preset(name)) return *s;
  throw ConfigError(ConfigError::Kind::Schema, "unknown preset '" + std::string(name) + "'");
}

}  // namespace fwguide
