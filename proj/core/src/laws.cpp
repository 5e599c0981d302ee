#include "fwguide/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

namespace fwguide {

namespace {

constexpr std::array<std::pair<LawKind, std::string_view>, 8> kLawNames{{
    {LawKind::Gradient, "gradient"},
    {LawKind::FiniteTime, "finite_time"},
    {LawKind::AdaptiveConstVelSI, "adaptive_si"},
    {LawKind::SmcKnownBoundSI, "smc_si"},
    {LawKind::AdaptiveSmcSI, "adaptive_smc_si"},
    {LawKind::PdDI, "pd_di"},
    {LawKind::AdaptiveConstVelDI, "adaptive_di"},
    {LawKind::SmcDI, "smc_di"},
}};

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("gain ") + name + " must be positive and finite");
  }
}

const Vec& require_velocity(const Measurement& meas) {
  if (!meas.own_velocity) {
    throw std::invalid_argument("law needs the agent's own velocity");
  }
  return *meas.own_velocity;
}

}  // namespace

std::string_view to_string(LawKind kind) {
  for (const auto& [k, name] : kLawNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

LawKind law_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kLawNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown law '" + std::string(name) + "'");
}

bool ControlLaw::needs_double_integrator() const {
  return kind == LawKind::PdDI || kind == LawKind::AdaptiveConstVelDI || kind == LawKind::SmcDI;
}

bool ControlLaw::uses_v_hat() const {
  return kind == LawKind::AdaptiveConstVelSI || kind == LawKind::AdaptiveConstVelDI;
}

bool ControlLaw::uses_beta() const { return kind == LawKind::AdaptiveSmcSI; }

bool ControlLaw::uses_q() const { return kind == LawKind::SmcDI; }

bool ControlLaw::uses_sign() const {
  return kind == LawKind::SmcKnownBoundSI || kind == LawKind::AdaptiveSmcSI ||
         kind == LawKind::SmcDI;
}

void ControlLaw::validate() const {
  switch (kind) {
    case LawKind::Gradient:
      break;
    case LawKind::FiniteTime:
      if (!(gains.a > 0.0 && gains.a < 1.0)) {
        throw std::invalid_argument("gain a must lie in (0, 1)");
      }
      break;
    case LawKind::AdaptiveConstVelSI:
    case LawKind::PdDI:
      require_positive(gains.k, "k");
      break;
    case LawKind::SmcKnownBoundSI:
      require_positive(gains.k, "k");
      require_positive(gains.beta, "beta");
      break;
    case LawKind::AdaptiveSmcSI:
      require_positive(gains.k, "k");
      require_positive(gains.k_beta, "k_beta");
      require_positive(gains.tau_beta, "tau_beta");
      if (!(gains.beta >= 0.0)) throw std::invalid_argument("initial beta must be >= 0");
      break;
    case LawKind::AdaptiveConstVelDI:
      require_positive(gains.k1, "k1");
      require_positive(gains.k2, "k2");
      break;
    case LawKind::SmcDI:
      require_positive(gains.beta, "beta");
      break;
  }
  if (uses_sign() && !(gains.phi >= 0.0)) {
    throw std::invalid_argument("boundary-layer width phi must be >= 0");
  }
}

ControllerState initial_controller_state(const ControlLaw& law, int dim) {
  ControllerState s;
  if (law.uses_v_hat()) s.v_hat = Vec::Zero(dim);
  if (law.uses_beta()) s.beta = law.gains.beta;
  if (law.uses_q()) s.q = Vec::Zero(dim);
  return s;
}

double AngleSignal::operator()(double t) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return amplitude;
    case Kind::Sine:
      return amplitude * std::sin(omega * t);
  }
  return 0.0;
}

Bearing rotate_bearing(const Bearing& g, double theta, const Vec& axis) {
  if (theta == 0.0 || g.squaredNorm() == 0.0) return g;
  if (g.size() == 2) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Bearing out(2);
    out << c * g[0] - s * g[1], s * g[0] + c * g[1];
    return out;
  }
  if (g.size() == 3) {
    const Eigen::Vector3d n = Eigen::Vector3d(axis[0], axis[1], axis[2]).normalized();
    const Eigen::Vector3d r = Eigen::AngleAxisd(theta, n) * Eigen::Vector3d(g[0], g[1], g[2]);
    return Bearing(r);
  }
  throw std::invalid_argument("rotate_bearing: only d = 2 or 3 is supported");
}

void NoiseModel::apply(std::span<Bearing> bearings, double t) const {
  if (angles.empty()) return;
  if (angles.size() != bearings.size()) {
    throw std::invalid_argument("noise model has " + std::to_string(angles.size()) +
                                " angles for " + std::to_string(bearings.size()) + " beacons");
  }
  for (std::size_t i = 0; i < bearings.size(); ++i) {
    bearings[i] = rotate_bearing(bearings[i], angles[i](t), axis);
  }
}

Vec wsum(const Measurement& meas, std::span<const double> weights) {
  if (meas.bearings.empty()) return Vec();
  Vec s = Vec::Zero(meas.bearings.front().size());
  for (std::size_t i = 0; i < meas.bearings.size(); ++i) s += weights[i] * meas.bearings[i];
  return s;
}

Vec sig_pow(const Vec& x, double a) {
  Vec out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double ax = std::abs(x[k]);
    out[k] = x[k] > 0.0 ? std::pow(ax, a) : (x[k] < 0.0 ? -std::pow(ax, a) : 0.0);
  }
  return out;
}

Vec sgn_phi(const Vec& x, double phi) {
  Vec out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (phi > 0.0) {
      out[k] = x[k] / std::max(std::abs(x[k]), phi);
    } else {
      out[k] = x[k] > 0.0 ? 1.0 : (x[k] < 0.0 ? -1.0 : 0.0);
    }
  }
  return out;
}

Vec law_gradient(const Measurement& meas, std::span<const double> weights) {
  return wsum(meas, weights);
}

Vec law_finite_time(const Measurement& meas, std::span<const double> weights, const Gains& gains) {
  return sig_pow(wsum(meas, weights), gains.a);
}

LawOutput law_adaptive_si(const Measurement& meas, const ControllerState& state,
                          std::span<const double> weights, const Gains& gains) {
  const Vec s = wsum(meas, weights);
  const Vec v_hat = state.v_hat ? *state.v_hat : Vec::Zero(s.size());
  LawOutput out{s + v_hat, {}};
  out.rate.v_hat = gains.k * s;
  return out;
}

Vec law_smc_si(const Measurement& meas, std::span<const double> weights, const Gains& gains) {
  const Vec s = wsum(meas, weights);
  return gains.k * s + gains.beta * sgn_phi(s, gains.phi);
}

LawOutput law_adaptive_smc_si(const Measurement& meas, const ControllerState& state,
                              std::span<const double> weights, const Gains& gains) {
  const Vec s = wsum(meas, weights);
  const double beta = state.beta.value_or(gains.beta);
  LawOutput out{gains.k * s + beta * sgn_phi(s, gains.phi), {}};
  out.rate.beta = gains.k_beta * (s.lpNorm<1>() - gains.tau_beta * beta);
  return out;
}

Vec law_pd_di(const Measurement& meas, std::span<const double> weights, const Gains& gains) {
  return wsum(meas, weights) - gains.k * require_velocity(meas);
}

LawOutput law_adaptive_di(const Measurement& meas, const ControllerState& state,
                          std::span<const double> weights, const Gains& gains) {
  const Vec& v = require_velocity(meas);
  const Vec s = wsum(meas, weights);
  const Vec v_hat = state.v_hat ? *state.v_hat : Vec::Zero(s.size());
  LawOutput out{(gains.k2 + 1.0) * s - gains.k1 * (v - v_hat), {}};
  out.rate.v_hat = gains.k2 * s;
  return out;
}

LawOutput law_smc_di(const Measurement& meas, const ControllerState& state,
                     std::span<const double> weights, const Gains& gains) {
  if (!meas.relative_velocity) {
    throw std::invalid_argument("smc_di needs the relative velocity v - v*");
  }
  const Vec& rel = *meas.relative_velocity;
  const Vec s = wsum(meas, weights);
  const Vec q = state.q ? *state.q : Vec::Zero(s.size());
  const Vec r = q - rel;
  LawOutput out{2.0 * s - 2.0 * rel + gains.beta * sgn_phi(r, gains.phi), {}};
  out.rate.q = s - rel;
  return out;
}

LawOutput evaluate(const ControlLaw& law, const Measurement& meas, const ControllerState& state,
                   std::span<const double> weights) {
  const Gains& g = law.gains;
  switch (law.kind) {
    case LawKind::Gradient:
      return {law_gradient(meas, weights), {}};
    case LawKind::FiniteTime:
      return {law_finite_time(meas, weights, g), {}};
    case LawKind::AdaptiveConstVelSI:
      return law_adaptive_si(meas, state, weights, g);
    case LawKind::SmcKnownBoundSI:
      return {law_smc_si(meas, weights, g), {}};
    case LawKind::AdaptiveSmcSI:
      return law_adaptive_smc_si(meas, state, weights, g);
    case LawKind::PdDI:
      return {law_pd_di(meas, weights, g), {}};
    case LawKind::AdaptiveConstVelDI:
      return law_adaptive_di(meas, state, weights, g);
    case LawKind::SmcDI:
      return law_smc_di(meas, state, weights, g);
  }
  throw std::logic_error("unhandled law kind");
}

}  // namespace fwguide
