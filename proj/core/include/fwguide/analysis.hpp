#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fwguide/laws.hpp"
#include "fwguide/world.hpp"

namespace fwguide {

// Lyapunov certificates. BearingGap is z^T W (g - g*) = sum_i w_i d_i (1 - g_i^T g_i*).
enum class LyapunovKind {
  Distance,       // |delta|^2 / 2
  BearingGap,     // bearing gap alone
  AdaptiveSI,     // gap + |v_hat - v*|^2 / (2k)
  AdaptiveSmcSI,  // gap + (beta - beta_bar)^2 / (2 k_beta)
  PdDI,           // gap + v^T v / 2
  AdaptiveDI,     // gap + |v - v_hat|^2 / 2 + |v_hat - v*|^2 / (2 k2)
  SmcDI,          // gap + |q|^2 / 2 + |q - v + v*|^2 / 2
};

LyapunovKind lyapunov_for(LawKind law);
std::string_view to_string(LyapunovKind kind);

// Everything the certificates need besides the trajectory itself.
struct AnalysisContext {
  BeaconField field;
  ControlLaw law;
  AgentModel model = AgentModel::SingleIntegrator;
  NoiseModel noise;
  Vec initial_optimum;  // Fermat-Weber point at t = 0
  double dt = 1e-3;
  double eps_guard = 1e-3;
  double beta_bar = 0.1;  // eta + 0.1 by default

  Vec optimum_at(double t) const { return moving_optimum(initial_optimum, field, t); }
  /// Radius of the ball around p* that keeps eps_guard clearance: min d_i* - eps_guard.
  double ball_radius() const;
  double min_optimum_distance() const;
  double max_optimum_distance() const;
  /// sum_i w_i P_{g_i*}.
  Mat optimum_projection_sum() const;
};

AnalysisContext make_context(const SimConfig& config);

/// z^T W (g - g*) evaluated as sum_i w_i z_i^T (g_i - g_i*).
double bearing_gap(const Vec& p, const BeaconSnapshot& field, const Vec& optimum);
/// z*^T W (g - g*).
double optimum_bearing_gap(const Vec& p, const BeaconSnapshot& field, const Vec& optimum);

double lyap_value(LyapunovKind kind, const AgentState& state, const AnalysisContext& ctx);

/// Fills V of every sample with the law's own certificate.
void attach_lyapunov(Trajectory& traj, const AnalysisContext& ctx);

/// Least-squares slope of log|delta| against t. Samples with delta == 0 are skipped.
double rate_fit(std::span<const double> t, std::span<const double> delta);
double rate_fit(const Trajectory& traj, double t_begin, double t_end);

/// True iff |delta(t)| <= bound for every sample with t >= after.
bool ultimate_bound_check(const Trajectory& traj, double bound, double after);

/// First sample time after which |delta| stays <= tol; empty if never.
std::optional<double> settling_time(const Trajectory& traj, double tol);

// Largest one-sample increase of V, and whether it stays within slack.
struct MonotoneResult {
  bool monotone = true;
  double max_increase = 0.0;
  std::size_t intervals = 0;  // sample intervals actually tested
};

MonotoneResult monotone_check(const Trajectory& traj, double slack);

/// Monotonicity restricted to sample intervals where every component of the
/// switching signal lies outside the boundary layer at both ends. The slack
/// is per integration step.
MonotoneResult monotone_outside_layer(const Trajectory& traj, const AnalysisContext& ctx,
                                      double slack_per_step);

/// sigma = lambda_min(sum w_i P_{g_i*}) / (|delta(0)| + max d_i*).
double exponential_rate(const AnalysisContext& ctx, double delta0);

/// |delta(t)|^2 <= |delta(0)|^2 exp(-(1 - slack) sigma t) at every sample.
/// max_t |delta(t)|^2 / (|delta0|^2 exp(-(1-slack) sigma t)); <= 1 means the envelope holds.
double exponential_envelope_ratio(const Trajectory& traj, const AnalysisContext& ctx, double slack);
bool exponential_envelope_check(const Trajectory& traj, const AnalysisContext& ctx, double slack);

/// Minimum of lambda_min(hessian_f) over a grid of `points_per_axis`^d
/// points restricted to the open ball of radius ball_radius() around p*.
double strong_convexity_constant(const AnalysisContext& ctx, int points_per_axis = 41);

/// min_i cos(theta_i(t)) over the given sample times.
double min_noise_cosine(const NoiseModel& noise, std::span<const double> times);

struct NoisyBound {
  double lambda = 1.0;  // min_i cos theta_i
  double m = 0.0;       // strong convexity constant on the ball
  double f_star = 0.0;
  double mu = 0.5;
  double bound = 0.0;   // sqrt(2 (1 - lambda) f* / ((1 - mu) m lambda))
};

NoisyBound noisy_ultimate_bound(const AnalysisContext& ctx, std::span<const double> times,
                                double mu = 0.5);

struct FiniteTimeBound {
  double chi = 0.0;  // lambda_min^2 / (4 lambda_max) of sum w_i P_{g_i*}
  double h = 0.0;    // (min d* - R) / (R + max d*)^2
  double kappa = 0.0;
  double v0 = 0.0;
  double T = 0.0;
};

FiniteTimeBound finite_time_bound(const AnalysisContext& ctx, double v0);

struct FiniteTimeCheck {
  std::optional<double> settling;
  FiniteTimeBound bound;
  bool within_bound = false;
};

FiniteTimeCheck finite_time_check(const Trajectory& traj, const AnalysisContext& ctx, double tol);

// Neighbourhood radius printed for the adaptive sliding-mode law.
struct AdaptiveSmcRadius {
  double rho = 0.0;
  double zeta = 0.0;
  double xi = 0.0;
};

AdaptiveSmcRadius adaptive_smc_radius(const AnalysisContext& ctx, double mu = 0.5);

// Pointwise geometric facts checked at every sample.
struct GeometryReport {
  bool gap_signs = true;        // z^T W(g-g*) >= 0 and z*^T W(g-g*) <= 0
  bool ball_alignment = true;   // inside the ball, g_i^T g_i* > 0 for all i
  bool distance_bounds = true;  // triangle-inequality bounds on d_i
  std::size_t samples_in_ball = 0;
};

GeometryReport geometry_checks(const Trajectory& traj, const AnalysisContext& ctx);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct CertificateOptions {
  double delta_tol = 5e-2;            // |delta| bound required from `after` on
  std::optional<double> after;        // defaults to the final sample time
  double settle_tol = 1e-6;
  double mu = 0.5;
  double monotone_slack = 1e-9;
  double layer_slack_per_step = 1e-6;
  double envelope_slack = 0.05;

  bool operator==(const CertificateOptions&) const = default;
};

struct CertificateReport {
  LawKind law = LawKind::Gradient;
  LyapunovKind lyapunov = LyapunovKind::Distance;
  std::vector<double> V;
  bool monotone = true;
  double max_increase = 0.0;
  double fitted_rate = 0.0;
  std::optional<double> settling_time;
  double ultimate_bound_observed = 0.0;
  bool collision_free = true;
  double min_distance = 0.0;
  std::vector<CheckResult> checks;
  // (t, beta) at every sample for laws with a sliding-mode gain; constant
  // for the fixed-gain laws.
  std::vector<std::pair<double, double>> beta_trace;

  bool passed() const;
};

/// Runs every check that applies to the trajectory's law. Expects V to be attached.
CertificateReport certify(const Trajectory& traj, const AnalysisContext& ctx,
                          const CertificateOptions& options);

}  // namespace fwguide
