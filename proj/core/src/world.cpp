#include "fwguide/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "fwguide/fw_oracle.hpp"

namespace fwguide {

namespace {

// Relative slack when comparing a declared bound against the profile's supremum.
constexpr double kBoundSlack = 1e-12;

struct Rates {
  Vec dp;
  std::optional<Vec> dv;
  ControllerState dc;
  double min_dist = 0.0;
};

LawOutput evaluate_at(const AgentState& s, const ControlLaw& law, const BeaconState& bs,
                      const NoiseModel* noise) {
  Measurement meas;
  meas.time = s.t;
  meas.bearings.reserve(bs.snapshot.size());
  for (const auto& pi : bs.snapshot.positions) meas.bearings.push_back(bearing(s.p, pi));
  if (noise) noise->apply(meas.bearings, s.t);
  if (s.v) meas.own_velocity = *s.v;
  if (law.needs_relative_velocity()) {
    if (!s.v) throw std::invalid_argument("relative velocity needs a double integrator");
    meas.relative_velocity = *s.v - bs.v_star;
  }
  return evaluate(law, meas, s.controller, bs.snapshot.weights);
}

Rates rates_at(const AgentState& s, const ControlLaw& law, const BeaconField& field,
               const NoiseModel* noise) {
  const BeaconState bs = beacon_state(field, s.t);
  LawOutput out = evaluate_at(s, law, bs, noise);

  Rates r;
  if (s.v) {
    r.dp = *s.v;
    r.dv = std::move(out.u);
  } else {
    r.dp = std::move(out.u);
  }
  r.dc = std::move(out.rate);
  r.min_dist = min_distance(s.p, bs.snapshot);
  return r;
}

// s + h * r, with time advanced by `dt_time`.
AgentState advance(const AgentState& s, const Rates& r, double h, double dt_time) {
  AgentState out = s;
  out.p += h * r.dp;
  if (out.v) *out.v += h * *r.dv;
  if (out.controller.v_hat) *out.controller.v_hat += h * *r.dc.v_hat;
  if (out.controller.beta) *out.controller.beta += h * *r.dc.beta;
  if (out.controller.q) *out.controller.q += h * *r.dc.q;
  out.t = s.t + dt_time;
  return out;
}

// Weighted combination (k1 + 2 k2 + 2 k3 + k4) / 6.
Rates rk4_blend(const Rates& k1, const Rates& k2, const Rates& k3, const Rates& k4) {
  auto mix = [](const Vec& a, const Vec& b, const Vec& c, const Vec& d) -> Vec {
    return (a + 2.0 * b + 2.0 * c + d) / 6.0;
  };
  Rates r;
  r.dp = mix(k1.dp, k2.dp, k3.dp, k4.dp);
  if (k1.dv) r.dv = mix(*k1.dv, *k2.dv, *k3.dv, *k4.dv);
  if (k1.dc.v_hat) r.dc.v_hat = mix(*k1.dc.v_hat, *k2.dc.v_hat, *k3.dc.v_hat, *k4.dc.v_hat);
  if (k1.dc.beta) r.dc.beta = (*k1.dc.beta + 2.0 * *k2.dc.beta + 2.0 * *k3.dc.beta + *k4.dc.beta) / 6.0;
  if (k1.dc.q) r.dc.q = mix(*k1.dc.q, *k2.dc.q, *k3.dc.q, *k4.dc.q);
  return r;
}

}  // namespace

MotionProfile MotionProfile::stationary(int dim) {
  MotionProfile m;
  m.kind = Kind::Stationary;
  m.velocity = Vec::Zero(dim);
  m.amplitude = Vec::Zero(dim);
  m.phase = Vec::Zero(dim);
  return m;
}

MotionProfile MotionProfile::constant(const Vec& v, double eta) {
  MotionProfile m = stationary(static_cast<int>(v.size()));
  m.kind = Kind::ConstantVel;
  m.velocity = v;
  m.eta = eta;
  return m;
}

MotionProfile MotionProfile::sinusoid(const Vec& offset, const Vec& amplitude, double frequency,
                                      const Vec& phase, double eta) {
  MotionProfile m = stationary(static_cast<int>(offset.size()));
  m.kind = Kind::SinusoidVel;
  m.velocity = offset;
  m.amplitude = amplitude;
  m.frequency = frequency;
  m.phase = phase;
  m.eta = eta;
  return m;
}

Vec MotionProfile::velocity_at(double t) const {
  switch (kind) {
    case Kind::Stationary:
      return Vec::Zero(velocity.size());
    case Kind::ConstantVel:
      return velocity;
    case Kind::SinusoidVel: {
      Vec v = velocity;
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        v[k] += amplitude[k] * std::sin(frequency * t + phase[k]);
      }
      return v;
    }
  }
  return Vec::Zero(velocity.size());
}

Vec MotionProfile::acceleration_at(double t) const {
  Vec a = Vec::Zero(velocity.size());
  if (kind == Kind::SinusoidVel) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      a[k] = amplitude[k] * frequency * std::cos(frequency * t + phase[k]);
    }
  }
  return a;
}

Vec MotionProfile::displacement(double t) const {
  switch (kind) {
    case Kind::Stationary:
      return Vec::Zero(velocity.size());
    case Kind::ConstantVel:
      return velocity * t;
    case Kind::SinusoidVel: {
      Vec x = velocity * t;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (frequency == 0.0) {
          x[k] += amplitude[k] * std::sin(phase[k]) * t;
        } else {
          x[k] += amplitude[k] * (std::cos(phase[k]) - std::cos(frequency * t + phase[k])) /
                  frequency;
        }
      }
      return x;
    }
  }
  return Vec::Zero(velocity.size());
}

double MotionProfile::velocity_bound() const {
  switch (kind) {
    case Kind::Stationary:
      return 0.0;
    case Kind::ConstantVel:
      return velocity.cwiseAbs().maxCoeff();
    case Kind::SinusoidVel: {
      if (frequency == 0.0) return velocity_at(0.0).cwiseAbs().maxCoeff();
      return (velocity.cwiseAbs() + amplitude.cwiseAbs()).maxCoeff();
    }
  }
  return 0.0;
}

double MotionProfile::acceleration_bound() const {
  if (kind != Kind::SinusoidVel) return 0.0;
  return amplitude.cwiseAbs().maxCoeff() * std::abs(frequency);
}

std::string_view to_string(MotionProfile::Kind kind) {
  switch (kind) {
    case MotionProfile::Kind::Stationary:
      return "stationary";
    case MotionProfile::Kind::ConstantVel:
      return "constant";
    case MotionProfile::Kind::SinusoidVel:
      return "sinusoid";
  }
  return "unknown";
}

int BeaconField::dim() const {
  return initial_positions.empty() ? 0 : static_cast<int>(initial_positions.front().size());
}

BeaconSnapshot BeaconField::snapshot(double t) const {
  BeaconSnapshot s;
  s.weights = weights;
  s.positions = initial_positions;
  if (motion.kind != MotionProfile::Kind::Stationary) {
    const Vec shift = motion.displacement(t);
    for (auto& p : s.positions) p += shift;
  }
  return s;
}

bool non_collinear(const std::vector<Vec>& positions) {
  if (positions.size() < 3) return false;
  const int d = static_cast<int>(positions.front().size());
  Eigen::MatrixXd centred(d, static_cast<Eigen::Index>(positions.size()));
  Vec mean = Vec::Zero(d);
  for (const auto& p : positions) mean += p;
  mean /= static_cast<double>(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) centred.col(i) = positions[i] - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
  const auto& sv = svd.singularValues();
  if (sv.size() < 2) return false;
  return sv[1] > 1e-9 * std::max(1.0, sv[0]);
}

void validate_field(const BeaconField& field) {
  const int d = field.dim();
  if (field.size() < 3) throw PhysicsViolation("need at least three beacons");
  if (field.weights.size() != field.size()) {
    throw PhysicsViolation("weights count does not match beacon count");
  }
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.initial_positions[i].size() != d || !field.initial_positions[i].allFinite()) {
      throw PhysicsViolation("beacon " + std::to_string(i) + " has a bad position");
    }
    if (!(field.weights[i] > 0.0) || !std::isfinite(field.weights[i])) {
      throw PhysicsViolation("weight of beacon " + std::to_string(i) + " must be positive");
    }
  }
  if (!non_collinear(field.initial_positions)) {
    throw PhysicsViolation("beacons are collinear; the uniqueness condition for the "
                           "Fermat-Weber point requires non-collinear beacons");
  }
  const MotionProfile& m = field.motion;
  if (m.kind != MotionProfile::Kind::Stationary) {
    if (m.velocity.size() != d || m.amplitude.size() != d || m.phase.size() != d) {
      throw PhysicsViolation("motion profile dimension does not match the beacons");
    }
    const double sup = m.velocity_bound();
    if (m.eta < sup * (1.0 - kBoundSlack)) {
      throw PhysicsViolation("declared eta " + std::to_string(m.eta) +
                             " is below the profile's velocity bound " + std::to_string(sup));
    }
  }
  ExistenceReport report;
  try {
    report = existence_check(field.snapshot(0.0));
  } catch (const std::invalid_argument& e) {
    throw PhysicsViolation(e.what());
  }
  if (!report.interior_minimum) {
    throw PhysicsViolation("interior-minimum condition fails: the Fermat-Weber point "
                           "sits on a beacon");
  }
}

BeaconState beacon_state(const BeaconField& field, double t) {
  return {field.snapshot(t), field.motion.velocity_at(t)};
}

Vec moving_optimum(const Vec& initial_optimum, const BeaconField& field, double t) {
  return initial_optimum + field.motion.displacement(t);
}

Vec moving_optimum(const BeaconField& field, double t) {
  return moving_optimum(weiszfeld(field.snapshot(0.0)).point, field, t);
}

std::string_view to_string(AgentModel model) {
  return model == AgentModel::SingleIntegrator ? "single" : "double";
}

LawOutput control_at(const AgentState& state, const ControlLaw& law, const BeaconField& field,
                     const NoiseModel* noise) {
  return evaluate_at(state, law, beacon_state(field, state.t), noise);
}

AgentState step(const AgentState& state, const ControlLaw& law, const BeaconField& field,
                double dt, const StepOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const NoiseModel* noise = options.noise && !options.noise->empty() ? options.noise : nullptr;

  const Rates k1 = rates_at(state, law, field, noise);
  double closest = k1.min_dist;
  AgentState next;
  if (!law.is_continuous()) {
    next = advance(state, k1, dt, dt);
  } else {
    const Rates k2 = rates_at(advance(state, k1, 0.5 * dt, 0.5 * dt), law, field, noise);
    const Rates k3 = rates_at(advance(state, k2, 0.5 * dt, 0.5 * dt), law, field, noise);
    const Rates k4 = rates_at(advance(state, k3, dt, dt), law, field, noise);
    closest = std::min({closest, k2.min_dist, k3.min_dist, k4.min_dist});
    next = advance(state, rk4_blend(k1, k2, k3, k4), dt, dt);
  }
  closest = std::min(closest, min_distance(next.p, field.snapshot(next.t)));
  if (closest < options.eps_guard) next.collided = true;
  return next;
}

Trajectory simulate(const SimConfig& config) {
  const BeaconField& field = config.field;
  const int d = field.dim();
  if (!(config.dt > 0.0) || !(config.horizon >= 0.0) || config.record_stride < 1) {
    throw std::invalid_argument("simulate: bad dt, horizon or record stride");
  }
  const Vec p_star0 = weiszfeld(field.snapshot(0.0)).point;
  const NoiseModel* noise = config.noise.empty() ? nullptr : &config.noise;

  Trajectory traj;
  traj.dim = d;
  traj.model = config.model;
  traj.law = config.law.kind;

  AgentState state;
  state.p = config.p0;
  if (config.model == AgentModel::DoubleIntegrator) {
    state.v = config.v0 ? *config.v0 : Vec::Zero(d);
  }
  state.controller = initial_controller_state(config.law, d);

  auto record = [&](const AgentState& s) {
    const BeaconSnapshot snap = field.snapshot(s.t);
    TrajectorySample sample;
    sample.t = s.t;
    sample.p = s.p;
    sample.v = s.v;
    sample.u = control_at(s, config.law, field, noise).u;
    sample.controller = s.controller;
    sample.delta_norm = (s.p - moving_optimum(p_star0, field, s.t)).norm();
    sample.f = objective(s.p, snap);
    sample.min_dist = min_distance(s.p, snap);
    traj.samples.push_back(std::move(sample));
  };

  const long long total = std::llround(config.horizon / config.dt);
  traj.samples.reserve(static_cast<std::size_t>(total / config.record_stride + 2));
  if (min_distance(state.p, field.snapshot(0.0)) < config.eps_guard) {
    traj.collided = true;
    traj.collision_time = 0.0;
    record(state);
    return traj;
  }
  record(state);

  const StepOptions options{noise, config.eps_guard};
  for (long long n = 1; n <= total; ++n) {
    state = step(state, config.law, field, config.dt, options);
    // Recompute time from the step count so long runs do not accumulate drift.
    state.t = static_cast<double>(n) * config.dt;
    if (state.collided) {
      traj.collided = true;
      traj.collision_time = state.t;
      record(state);
      break;
    }
    if (n % config.record_stride == 0 || n == total) record(state);
  }
  return traj;
}

}  // namespace fwguide
