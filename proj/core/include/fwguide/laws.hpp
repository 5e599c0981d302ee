#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwguide/vecgeom.hpp"

namespace fwguide {

// Eight law variants. The ninth guidance law, gradient descent on
// rotation-corrupted bearings, is LawKind::Gradient paired with a NoiseModel.
enum class LawKind {
  Gradient,            // u = sum w_i g_i
  FiniteTime,          // u = sig^a(sum w_i g_i)
  AdaptiveConstVelSI,  // u = sum w_i g_i + v_hat,          dv_hat = k sum w_i g_i
  SmcKnownBoundSI,     // u = k sum w_i g_i + beta sgn(.)
  AdaptiveSmcSI,       // same with dbeta = k_beta(|sum w_i g_i|_1 - tau_beta beta)
  PdDI,                // u = sum w_i g_i - k v
  AdaptiveConstVelDI,  // u = (k2+1) sum w_i g_i - k1 (v - v_hat), dv_hat = k2 sum w_i g_i
  SmcDI,               // dq = s - (v - v*), u = 2 s - 2 (v - v*) + beta sgn(q - (v - v*))
};

std::string_view to_string(LawKind kind);
/// Throws std::invalid_argument for an unknown name.
LawKind law_kind_from_string(std::string_view name);

struct Gains {
  double k = 1.0;
  double a = 0.5;
  double beta = 1.0;  // fixed gain, or beta(0) for AdaptiveSmcSI
  double k_beta = 1.0;
  double tau_beta = 0.1;
  double k1 = 1.0;
  double k2 = 1.0;
  double phi = 1e-3;  // boundary-layer width; 0 selects the exact sign

  bool operator==(const Gains&) const = default;
};

struct ControlLaw {
  LawKind kind = LawKind::Gradient;
  Gains gains;

  bool operator==(const ControlLaw&) const = default;

  bool needs_double_integrator() const;
  bool uses_v_hat() const;
  bool uses_beta() const;
  bool uses_q() const;
  bool uses_sign() const;
  bool needs_relative_velocity() const { return kind == LawKind::SmcDI; }
  /// False only for a sign-based law with phi == 0.
  bool is_continuous() const { return !uses_sign() || gains.phi > 0.0; }

  /// Throws std::invalid_argument when a gain relevant to `kind` is out of range.
  void validate() const;
};

struct Measurement {
  std::vector<Bearing> bearings;
  std::optional<Vec> own_velocity;
  std::optional<Vec> relative_velocity;
  double time = 0.0;
};

struct ControllerState {
  std::optional<Vec> v_hat;
  std::optional<double> beta;
  std::optional<Vec> q;

  bool operator==(const ControllerState&) const = default;
};

/// v_hat(0) = 0, beta(0) = gains.beta, q(0) = 0, for the fields the law uses.
ControllerState initial_controller_state(const ControlLaw& law, int dim);

struct LawOutput {
  Vec u;
  ControllerState rate;  // time derivative of every field the law carries
};

// Angle signal theta(t): zero, a constant, or amplitude * sin(omega t).
struct AngleSignal {
  enum class Kind { Zero, Constant, Sine };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double omega = 0.0;

  double operator()(double t) const;
  bool operator==(const AngleSignal&) const = default;
};

// Per-beacon rotation of the measured bearings. Empty `angles` means exact
// measurements. In 3-D every rotation is about `axis`.
struct NoiseModel {
  std::vector<AngleSignal> angles;
  Vec axis = Vec::Unit(3, 2);

  bool empty() const { return angles.empty(); }
  bool operator==(const NoiseModel&) const = default;

  /// Rotates each bearing in place by its angle at time t.
  void apply(std::span<Bearing> bearings, double t) const;
};

/// Rotation of g by theta: planar in 2-D, about `axis` in 3-D. A zero bearing
/// is returned unchanged.
Bearing rotate_bearing(const Bearing& g, double theta, const Vec& axis = Vec::Unit(3, 2));

/// sum_i w_i g_i over the measured bearings.
Vec wsum(const Measurement& meas, std::span<const double> weights);

/// Componentwise sgn(x)|x|^a.
Vec sig_pow(const Vec& x, double a);

/// Exact sign when phi == 0, else x / max(|x|, phi) componentwise.
Vec sgn_phi(const Vec& x, double phi);

Vec law_gradient(const Measurement& meas, std::span<const double> weights);
Vec law_finite_time(const Measurement& meas, std::span<const double> weights, const Gains& gains);
LawOutput law_adaptive_si(const Measurement& meas, const ControllerState& state,
                          std::span<const double> weights, const Gains& gains);
Vec law_smc_si(const Measurement& meas, std::span<const double> weights, const Gains& gains);
LawOutput law_adaptive_smc_si(const Measurement& meas, const ControllerState& state,
                              std::span<const double> weights, const Gains& gains);
Vec law_pd_di(const Measurement& meas, std::span<const double> weights, const Gains& gains);
LawOutput law_adaptive_di(const Measurement& meas, const ControllerState& state,
                          std::span<const double> weights, const Gains& gains);
LawOutput law_smc_di(const Measurement& meas, const ControllerState& state,
                     std::span<const double> weights, const Gains& gains);

/// Dispatches on law.kind.
LawOutput evaluate(const ControlLaw& law, const Measurement& meas, const ControllerState& state,
                   std::span<const double> weights);

}  // namespace fwguide
