#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fwguide/laws.hpp"
#include "fwguide/vecgeom.hpp"

namespace fwguide {

// Common velocity v*(t) shared by every beacon.
struct MotionProfile {
  enum class Kind { Stationary, ConstantVel, SinusoidVel };

  Kind kind = Kind::Stationary;
  Vec velocity;   // ConstantVel: v*. SinusoidVel: the offset term.
  Vec amplitude;  // SinusoidVel: v*_k(t) = velocity_k + amplitude_k sin(frequency t + phase_k)
  double frequency = 0.0;
  Vec phase;
  double eta = 0.0;  // declared bound on |v*|_inf

  static MotionProfile stationary(int dim);
  static MotionProfile constant(const Vec& v, double eta);
  static MotionProfile sinusoid(const Vec& offset, const Vec& amplitude, double frequency,
                                const Vec& phase, double eta);

  Vec velocity_at(double t) const;
  Vec acceleration_at(double t) const;
  /// Closed-form integral of v* over [0, t].
  Vec displacement(double t) const;
  /// sup_t |v*(t)|_inf.
  double velocity_bound() const;
  /// sup_t |dv*/dt|_inf.
  double acceleration_bound() const;

  bool operator==(const MotionProfile&) const = default;
};

std::string_view to_string(MotionProfile::Kind kind);

struct BeaconField {
  std::vector<Vec> initial_positions;
  std::vector<double> weights;
  MotionProfile motion;

  int dim() const;
  std::size_t size() const { return initial_positions.size(); }
  BeaconSnapshot snapshot(double t) const;
  bool operator==(const BeaconField&) const = default;
};

// Thrown when a configuration violates a physical precondition.
class PhysicsViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks n >= 3, positive weights, non-collinear beacons, a declared eta that
/// covers the motion profile, and that the minimiser is not a beacon.
/// Throws PhysicsViolation.
void validate_field(const BeaconField& field);

/// True when the centred positions span at least two dimensions.
bool non_collinear(const std::vector<Vec>& positions);

struct BeaconState {
  BeaconSnapshot snapshot;
  Vec v_star;
};

BeaconState beacon_state(const BeaconField& field, double t);

/// Fermat-Weber point of the field at t = 0, advected by the common velocity.
Vec moving_optimum(const BeaconField& field, double t);
Vec moving_optimum(const Vec& initial_optimum, const BeaconField& field, double t);

enum class AgentModel { SingleIntegrator, DoubleIntegrator };

std::string_view to_string(AgentModel model);

struct AgentState {
  Vec p;
  std::optional<Vec> v;  // present iff double integrator
  ControllerState controller;
  double t = 0.0;
  bool collided = false;

  AgentModel model() const {
    return v ? AgentModel::DoubleIntegrator : AgentModel::SingleIntegrator;
  }
};

struct StepOptions {
  const NoiseModel* noise = nullptr;
  double eps_guard = 1e-3;
};

/// Control input (and controller rates) the law produces at `state`.
LawOutput control_at(const AgentState& state, const ControlLaw& law, const BeaconField& field,
                     const NoiseModel* noise = nullptr);

/// Advances one fixed step: classical RK4 for continuous laws, explicit Euler
/// when the law uses the exact sign. Bearings are re-measured at every stage.
/// Sets `collided` if any stage comes within eps_guard of a beacon.
AgentState step(const AgentState& state, const ControlLaw& law, const BeaconField& field,
                double dt, const StepOptions& options = {});

struct TrajectorySample {
  double t = 0.0;
  Vec p;
  std::optional<Vec> v;
  Vec u;
  ControllerState controller;
  double delta_norm = 0.0;
  double f = 0.0;
  double V = 0.0;  // filled by attach_lyapunov()
  double min_dist = 0.0;
};

struct Trajectory {
  int dim = 2;
  AgentModel model = AgentModel::SingleIntegrator;
  LawKind law = LawKind::Gradient;
  std::vector<TrajectorySample> samples;
  bool collided = false;
  std::optional<double> collision_time;
};

struct SimConfig {
  BeaconField field;
  AgentModel model = AgentModel::SingleIntegrator;
  ControlLaw law;
  NoiseModel noise;
  Vec p0;
  std::optional<Vec> v0;  // zero when absent for a double integrator
  double dt = 1e-3;
  double horizon = 10.0;
  int record_stride = 10;
  double eps_guard = 1e-3;
};

/// Runs from t = 0 to the horizon (or the first collision), recording every
/// record_stride steps and the final state. V is left at zero.
Trajectory simulate(const SimConfig& config);

}  // namespace fwguide
