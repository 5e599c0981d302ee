#include "fwguide/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fwguide/fw_oracle.hpp"

namespace fwguide {

namespace {

// Rounding allowance for the pointwise geometric inequalities.
constexpr double kGeometryTol = 1e-9;

AgentState state_of(const TrajectorySample& s) {
  AgentState a;
  a.p = s.p;
  a.v = s.v;
  a.controller = s.controller;
  a.t = s.t;
  return a;
}

// The signal whose sign the law switches on: sum w_i g_i for the
// single-integrator sliding laws, q - (v - v*) for the double-integrator one.
std::optional<Vec> switching_signal(const TrajectorySample& s, const AnalysisContext& ctx) {
  switch (ctx.law.kind) {
    case LawKind::SmcKnownBoundSI:
    case LawKind::AdaptiveSmcSI: {
      const BeaconSnapshot snap = ctx.field.snapshot(s.t);
      std::vector<Bearing> g;
      g.reserve(snap.size());
      for (const auto& pi : snap.positions) g.push_back(bearing(s.p, pi));
      if (!ctx.noise.empty()) ctx.noise.apply(g, s.t);
      Measurement m;
      m.bearings = std::move(g);
      return wsum(m, snap.weights);
    }
    case LawKind::SmcDI: {
      if (!s.v || !s.controller.q) return std::nullopt;
      return Vec(*s.controller.q - (*s.v - ctx.field.motion.velocity_at(s.t)));
    }
    default:
      return std::nullopt;
  }
}

bool outside_layer(const Vec& x, double phi) {
  return (x.array().abs() >= phi).all();
}

}  // namespace

LyapunovKind lyapunov_for(LawKind law) {
  switch (law) {
    case LawKind::Gradient:
      return LyapunovKind::Distance;
    case LawKind::FiniteTime:
    case LawKind::SmcKnownBoundSI:
      return LyapunovKind::BearingGap;
    case LawKind::AdaptiveConstVelSI:
      return LyapunovKind::AdaptiveSI;
    case LawKind::AdaptiveSmcSI:
      return LyapunovKind::AdaptiveSmcSI;
    case LawKind::PdDI:
      return LyapunovKind::PdDI;
    case LawKind::AdaptiveConstVelDI:
      return LyapunovKind::AdaptiveDI;
    case LawKind::SmcDI:
      return LyapunovKind::SmcDI;
  }
  return LyapunovKind::Distance;
}

std::string_view to_string(LyapunovKind kind) {
  switch (kind) {
    case LyapunovKind::Distance:
      return "distance";
    case LyapunovKind::BearingGap:
      return "bearing_gap";
    case LyapunovKind::AdaptiveSI:
      return "adaptive_si";
    case LyapunovKind::AdaptiveSmcSI:
      return "adaptive_smc_si";
    case LyapunovKind::PdDI:
      return "pd_di";
    case LyapunovKind::AdaptiveDI:
      return "adaptive_di";
    case LyapunovKind::SmcDI:
      return "smc_di";
  }
  return "unknown";
}

double AnalysisContext::min_optimum_distance() const {
  return min_distance(initial_optimum, field.snapshot(0.0));
}

double AnalysisContext::max_optimum_distance() const {
  return max_distance(initial_optimum, field.snapshot(0.0));
}

double AnalysisContext::ball_radius() const { return min_optimum_distance() - eps_guard; }

Mat AnalysisContext::optimum_projection_sum() const {
  return weighted_projection_sum(initial_optimum, field.snapshot(0.0));
}

AnalysisContext make_context(const SimConfig& config) {
  AnalysisContext ctx;
  ctx.field = config.field;
  ctx.law = config.law;
  ctx.model = config.model;
  ctx.noise = config.noise;
  ctx.initial_optimum = weiszfeld(config.field.snapshot(0.0)).point;
  ctx.dt = config.dt;
  ctx.eps_guard = config.eps_guard;
  ctx.beta_bar = config.field.motion.eta + 0.1;
  return ctx;
}

double bearing_gap(const Vec& p, const BeaconSnapshot& field, const Vec& optimum) {
  double v = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec z = field.positions[i] - p;
    v += field.weights[i] * z.dot(bearing(p, field.positions[i]) - bearing(optimum, field.positions[i]));
  }
  return v;
}

double optimum_bearing_gap(const Vec& p, const BeaconSnapshot& field, const Vec& optimum) {
  double v = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec z_star = field.positions[i] - optimum;
    v += field.weights[i] *
         z_star.dot(bearing(p, field.positions[i]) - bearing(optimum, field.positions[i]));
  }
  return v;
}

double lyap_value(LyapunovKind kind, const AgentState& state, const AnalysisContext& ctx) {
  const Vec p_star = ctx.optimum_at(state.t);
  if (kind == LyapunovKind::Distance) return 0.5 * (state.p - p_star).squaredNorm();

  const BeaconSnapshot snap = ctx.field.snapshot(state.t);
  const Vec v_star = ctx.field.motion.velocity_at(state.t);
  const Gains& g = ctx.law.gains;
  double V = bearing_gap(state.p, snap, p_star);
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("lyap_value: state lacks ") + what);
  };
  switch (kind) {
    case LyapunovKind::Distance:
    case LyapunovKind::BearingGap:
      break;
    case LyapunovKind::AdaptiveSI:
      need(state.controller.v_hat.has_value(), "v_hat");
      V += (*state.controller.v_hat - v_star).squaredNorm() / (2.0 * g.k);
      break;
    case LyapunovKind::AdaptiveSmcSI: {
      need(state.controller.beta.has_value(), "beta");
      const double e = *state.controller.beta - ctx.beta_bar;
      V += e * e / (2.0 * g.k_beta);
      break;
    }
    case LyapunovKind::PdDI:
      need(state.v.has_value(), "velocity");
      V += 0.5 * state.v->squaredNorm();
      break;
    case LyapunovKind::AdaptiveDI:
      need(state.v.has_value() && state.controller.v_hat.has_value(), "velocity or v_hat");
      V += 0.5 * (*state.v - *state.controller.v_hat).squaredNorm() +
           (*state.controller.v_hat - v_star).squaredNorm() / (2.0 * g.k2);
      break;
    case LyapunovKind::SmcDI: {
      need(state.v.has_value() && state.controller.q.has_value(), "velocity or q");
      const Vec& q = *state.controller.q;
      V += 0.5 * q.squaredNorm() + 0.5 * (q - *state.v + v_star).squaredNorm();
      break;
    }
  }
  return V;
}

void attach_lyapunov(Trajectory& traj, const AnalysisContext& ctx) {
  const LyapunovKind kind = lyapunov_for(traj.law);
  for (auto& s : traj.samples) s.V = lyap_value(kind, state_of(s), ctx);
}

double rate_fit(std::span<const double> t, std::span<const double> delta) {
  if (t.size() != delta.size()) throw std::invalid_argument("rate_fit: length mismatch");
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(delta[i] > 0.0) || !std::isfinite(delta[i])) continue;
    const double y = std::log(delta[i]);
    n += 1.0;
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double den = n * stt - st * st;
  if (n < 2.0 || den == 0.0) return 0.0;
  return (n * sty - st * sy) / den;
}

double rate_fit(const Trajectory& traj, double t_begin, double t_end) {
  std::vector<double> t, d;
  for (const auto& s : traj.samples) {
    if (s.t >= t_begin && s.t <= t_end) {
      t.push_back(s.t);
      d.push_back(s.delta_norm);
    }
  }
  return rate_fit(t, d);
}

bool ultimate_bound_check(const Trajectory& traj, double bound, double after) {
  bool any = false;
  for (const auto& s : traj.samples) {
    if (s.t >= after) {
      any = true;
      if (!(s.delta_norm <= bound)) return false;
    }
  }
  return any;
}

std::optional<double> settling_time(const Trajectory& traj, double tol) {
  std::optional<double> settled;
  for (const auto& s : traj.samples) {
    if (s.delta_norm <= tol) {
      if (!settled) settled = s.t;
    } else {
      settled.reset();
    }
  }
  return settled;
}

MonotoneResult monotone_check(const Trajectory& traj, double slack) {
  MonotoneResult r;
  for (std::size_t j = 1; j < traj.samples.size(); ++j) {
    const double inc = traj.samples[j].V - traj.samples[j - 1].V;
    r.max_increase = std::max(r.max_increase, inc);
    if (inc > slack) r.monotone = false;
  }
  return r;
}

MonotoneResult monotone_outside_layer(const Trajectory& traj, const AnalysisContext& ctx,
                                      double slack_per_step) {
  MonotoneResult r;
  const double phi = ctx.law.gains.phi;
  std::optional<Vec> prev;
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    std::optional<Vec> cur = switching_signal(traj.samples[j], ctx);
    if (j > 0 && prev && cur && outside_layer(*prev, phi) && outside_layer(*cur, phi)) {
      const double steps =
          std::max(1.0, std::round((traj.samples[j].t - traj.samples[j - 1].t) / ctx.dt));
      const double inc = traj.samples[j].V - traj.samples[j - 1].V;
      r.max_increase = std::max(r.max_increase, inc);
      ++r.intervals;
      if (inc > slack_per_step * steps) r.monotone = false;
    }
    prev = std::move(cur);
  }
  return r;
}

double exponential_rate(const AnalysisContext& ctx, double delta0) {
  return lambda_min(ctx.optimum_projection_sum()) / (delta0 + ctx.max_optimum_distance());
}

double exponential_envelope_ratio(const Trajectory& traj, const AnalysisContext& ctx,
                                  double slack) {
  if (traj.samples.empty()) return 0.0;
  const double d0 = traj.samples.front().delta_norm;
  if (d0 == 0.0) return 0.0;
  const double sigma = exponential_rate(ctx, d0);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double envelope = d0 * d0 * std::exp(-(1.0 - slack) * sigma * s.t);
    worst = std::max(worst, s.delta_norm * s.delta_norm / envelope);
  }
  return worst;
}

bool exponential_envelope_check(const Trajectory& traj, const AnalysisContext& ctx,
                                double slack) {
  return exponential_envelope_ratio(traj, ctx, slack) <= 1.0;
}

double strong_convexity_constant(const AnalysisContext& ctx, int points_per_axis) {
  if (points_per_axis < 2) throw std::invalid_argument("need at least two grid points per axis");
  const BeaconSnapshot snap = ctx.field.snapshot(0.0);
  const Vec& c = ctx.initial_optimum;
  const double R = ctx.ball_radius();
  const int d = static_cast<int>(c.size());
  const double h = 2.0 * R / (points_per_axis - 1);
  double m = std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  Vec p(d);
  while (true) {
    for (int k = 0; k < d; ++k) p[k] = c[k] - R + h * idx[k];
    if ((p - c).norm() < R) m = std::min(m, lambda_min(hessian_f(p, snap)));
    int k = 0;
    while (k < d && ++idx[k] >= points_per_axis) {
      idx[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return m;
}

double min_noise_cosine(const NoiseModel& noise, std::span<const double> times) {
  double lambda = 1.0;
  for (const auto& a : noise.angles) {
    for (double t : times) lambda = std::min(lambda, std::cos(a(t)));
  }
  return lambda;
}

NoisyBound noisy_ultimate_bound(const AnalysisContext& ctx, std::span<const double> times,
                                double mu) {
  NoisyBound b;
  b.mu = mu;
  b.lambda = min_noise_cosine(ctx.noise, times);
  b.m = strong_convexity_constant(ctx);
  b.f_star = objective(ctx.initial_optimum, ctx.field.snapshot(0.0));
  if (!(b.lambda > 0.0)) {
    b.bound = std::numeric_limits<double>::infinity();
  } else {
    b.bound = std::sqrt(2.0 * (1.0 - b.lambda) * b.f_star / ((1.0 - mu) * b.m * b.lambda));
  }
  return b;
}

FiniteTimeBound finite_time_bound(const AnalysisContext& ctx, double v0) {
  FiniteTimeBound b;
  const Mat S = ctx.optimum_projection_sum();
  const double lmin = lambda_min(S);
  const double lmax = lambda_max(S);
  const double dmin = ctx.min_optimum_distance();
  const double dmax = ctx.max_optimum_distance();
  const double R = ctx.ball_radius();
  const double a = ctx.law.gains.a;
  const double d = static_cast<double>(ctx.initial_optimum.size());
  b.chi = lmin * lmin / (4.0 * lmax);
  b.h = (dmin - R) / ((R + dmax) * (R + dmax));
  b.kappa = std::pow(d, (1.0 - a) / 2.0) * std::pow(b.chi * b.h, (a + 1.0) / 2.0);
  b.v0 = v0;
  b.T = 2.0 * std::pow(v0, (1.0 - a) / 2.0) / (std::pow(b.kappa, (a + 1.0) / 2.0) * (1.0 - a));
  return b;
}

FiniteTimeCheck finite_time_check(const Trajectory& traj, const AnalysisContext& ctx,
                                  double tol) {
  FiniteTimeCheck c;
  c.settling = settling_time(traj, tol);
  const double v0 = traj.samples.empty()
                        ? 0.0
                        : bearing_gap(traj.samples.front().p, ctx.field.snapshot(0.0),
                                      ctx.initial_optimum);
  c.bound = finite_time_bound(ctx, v0);
  c.within_bound = c.settling.has_value() && *c.settling <= c.bound.T;
  return c;
}

AdaptiveSmcRadius adaptive_smc_radius(const AnalysisContext& ctx, double mu) {
  AdaptiveSmcRadius r;
  const Mat S = ctx.optimum_projection_sum();
  const double lmin = lambda_min(S);
  const double lmax = lambda_max(S);
  const double dmin = ctx.min_optimum_distance();
  const double dmax = ctx.max_optimum_distance();
  const double R = ctx.ball_radius();
  const double chi = lmin * lmin / (4.0 * lmax);
  const double h = (dmin - R) / ((R + dmax) * (R + dmax));
  const Gains& g = ctx.law.gains;
  r.rho = std::min(g.k * chi * h, g.k_beta * g.tau_beta);
  r.zeta = g.tau_beta * ctx.beta_bar * ctx.beta_bar / (lmin * r.rho * mu);
  r.xi = (r.zeta + std::sqrt(r.zeta * r.zeta + 4.0 * r.zeta * dmax)) / 2.0;
  return r;
}

GeometryReport geometry_checks(const Trajectory& traj, const AnalysisContext& ctx) {
  GeometryReport rep;
  const double R = ctx.ball_radius();
  const double dmin = ctx.min_optimum_distance();
  const double dmax = ctx.max_optimum_distance();
  for (const auto& s : traj.samples) {
    const BeaconSnapshot snap = ctx.field.snapshot(s.t);
    const Vec p_star = ctx.optimum_at(s.t);
    const double scale = 1.0 + objective(s.p, snap);
    if (bearing_gap(s.p, snap, p_star) < -kGeometryTol * scale ||
        optimum_bearing_gap(s.p, snap, p_star) > kGeometryTol * scale) {
      rep.gap_signs = false;
    }
    const double delta = (s.p - p_star).norm();
    for (std::size_t i = 0; i < snap.size(); ++i) {
      const double di = (snap.positions[i] - s.p).norm();
      const double tol = kGeometryTol * (1.0 + di + delta + dmax);
      if (di > delta + dmax + tol || di < delta - dmax - tol || di < dmin - delta - tol) {
        rep.distance_bounds = false;
      }
    }
    if (delta < R) {
      ++rep.samples_in_ball;
      for (const auto& pi : snap.positions) {
        if (!(bearing(s.p, pi).dot(bearing(p_star, pi)) > 0.0)) rep.ball_alignment = false;
      }
    }
  }
  return rep;
}

bool CertificateReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CertificateReport certify(const Trajectory& traj, const AnalysisContext& ctx,
                          const CertificateOptions& options) {
  CertificateReport rep;
  rep.law = traj.law;
  rep.lyapunov = lyapunov_for(traj.law);
  rep.collision_free = !traj.collided;
  rep.min_distance = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    rep.V.push_back(s.V);
    rep.min_distance = std::min(rep.min_distance, s.min_dist);
  }
  rep.checks.push_back({"collision_free", rep.collision_free, rep.min_distance, ctx.eps_guard});
  if (ctx.law.uses_sign()) {
    for (const auto& s : traj.samples) {
      rep.beta_trace.emplace_back(s.t, s.controller.beta.value_or(ctx.law.gains.beta));
    }
  }
  if (traj.samples.empty()) return rep;

  const double t_end = traj.samples.back().t;
  const double after = options.after.value_or(t_end);
  rep.fitted_rate = rate_fit(traj, 0.0, t_end);
  rep.settling_time = settling_time(traj, options.settle_tol);
  for (const auto& s : traj.samples) {
    if (s.t >= after) rep.ultimate_bound_observed = std::max(rep.ultimate_bound_observed, s.delta_norm);
  }

  const bool noisy = !ctx.noise.empty();
  const bool smooth_certificate =
      !(traj.law == LawKind::AdaptiveSmcSI) && !(traj.law == LawKind::Gradient && noisy);
  if (smooth_certificate) {
    MonotoneResult m = ctx.law.uses_sign()
                           ? monotone_outside_layer(traj, ctx, options.layer_slack_per_step)
                           : monotone_check(traj, options.monotone_slack);
    rep.monotone = m.monotone;
    rep.max_increase = m.max_increase;
    const bool tested = !ctx.law.uses_sign() || m.intervals > 0;
    rep.checks.push_back({ctx.law.uses_sign() ? "lyapunov_monotone_outside_layer"
                                              : "lyapunov_monotone",
                          m.monotone && tested, m.max_increase,
                          ctx.law.uses_sign() ? options.layer_slack_per_step
                                              : options.monotone_slack});
  }

  const GeometryReport geo = geometry_checks(traj, ctx);
  rep.checks.push_back({"gap_signs", geo.gap_signs, 0.0, 0.0});
  rep.checks.push_back({"distance_bounds", geo.distance_bounds, 0.0, 0.0});
  rep.checks.push_back({"ball_alignment", geo.ball_alignment,
                        static_cast<double>(geo.samples_in_ball), 0.0});

  switch (traj.law) {
    case LawKind::Gradient:
      if (noisy) {
        std::vector<double> times;
        for (const auto& s : traj.samples) times.push_back(s.t);
        const NoisyBound b = noisy_ultimate_bound(ctx, times, options.mu);
        rep.checks.push_back({"noisy_ultimate_bound", ultimate_bound_check(traj, b.bound, after),
                              rep.ultimate_bound_observed, b.bound});
      } else {
        const double ratio = exponential_envelope_ratio(traj, ctx, options.envelope_slack);
        rep.checks.push_back({"exponential_envelope", ratio <= 1.0, ratio, 1.0});
        rep.checks.push_back({"delta_bound", ultimate_bound_check(traj, options.delta_tol, after),
                              rep.ultimate_bound_observed, options.delta_tol});
      }
      break;
    case LawKind::FiniteTime: {
      const FiniteTimeCheck ft = finite_time_check(traj, ctx, options.settle_tol);
      if (traj.samples.front().delta_norm < ctx.ball_radius()) {
        rep.checks.push_back({"finite_time_settling", ft.within_bound,
                              ft.settling.value_or(std::numeric_limits<double>::infinity()),
                              ft.bound.T});
      } else {
        rep.checks.push_back({"delta_bound", ultimate_bound_check(traj, options.delta_tol, after),
                              rep.ultimate_bound_observed, options.delta_tol});
      }
      break;
    }
    case LawKind::AdaptiveSmcSI: {
      double beta_min = std::numeric_limits<double>::infinity();
      double beta_max = 0.0;
      for (const auto& s : traj.samples) {
        if (s.controller.beta) {
          beta_min = std::min(beta_min, *s.controller.beta);
          beta_max = std::max(beta_max, *s.controller.beta);
        }
      }
      rep.checks.push_back({"beta_nonnegative", beta_min >= 0.0, beta_min, 0.0});
      rep.checks.push_back({"beta_bounded", std::isfinite(beta_max), beta_max, 0.0});
      const AdaptiveSmcRadius r = adaptive_smc_radius(ctx, options.mu);
      // Printed neighbourhood radius, reported next to the observed bound only.
      rep.checks.push_back({"neighbourhood_radius_formula", true, rep.ultimate_bound_observed, r.xi});
      rep.checks.push_back({"delta_bound", ultimate_bound_check(traj, options.delta_tol, after),
                            rep.ultimate_bound_observed, options.delta_tol});
      break;
    }
    default:
      rep.checks.push_back({"delta_bound", ultimate_bound_check(traj, options.delta_tol, after),
                            rep.ultimate_bound_observed, options.delta_tol});
      break;
  }

  const TrajectorySample& last = traj.samples.back();
  const Vec v_star = ctx.field.motion.velocity_at(last.t);
  if (traj.law == LawKind::AdaptiveConstVelSI && last.controller.v_hat) {
    const double err = (*last.controller.v_hat - v_star).norm();
    rep.checks.push_back({"velocity_estimate", err <= options.delta_tol, err, options.delta_tol});
  }
  if (traj.law == LawKind::AdaptiveConstVelDI && last.v) {
    const double err = (*last.v - v_star).norm();
    rep.checks.push_back({"velocity_tracking", err <= options.delta_tol, err, options.delta_tol});
  }
  return rep;
}

}  // namespace fwguide
