#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fwguide/analysis.hpp"
#include "fwguide/fw_oracle.hpp"
#include "fwguide/presets.hpp"
#include "fwguide/scenario.hpp"
#include "oracles.hpp"

using namespace fwguide;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Trajectory synthetic(const std::vector<double>& t, const std::vector<double>& delta,
                     const std::vector<double>& V = {}) {
  Trajectory tr;
  for (std::size_t i = 0; i < t.size(); ++i) {
    TrajectorySample s;
    s.t = t[i];
    s.p = v2(delta[i], 0);
    s.delta_norm = delta[i];
    s.V = V.empty() ? 0.0 : V[i];
    tr.samples.push_back(s);
  }
  return tr;
}

AnalysisContext hexagon_context(LawKind kind = LawKind::Gradient) {
  SimConfig c;
  c.field = hexagon_field();
  c.law.kind = kind;
  c.p0 = v2(0.5, 0.5);
  return make_context(c);
}

}  // namespace

TEST(BearingGap, SignsAndZeroAtOptimum) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 2;
    const BeaconSnapshot field = fwguide::testing::random_field(rng, 3 + trial % 6, d);
    const Vec opt = weiszfeld(field).point;
    const Vec p = fwguide::testing::random_point(rng, d);
    if (min_distance(p, field) < 1e-3) continue;
    EXPECT_GE(bearing_gap(p, field, opt), -1e-12);
    EXPECT_LE(optimum_bearing_gap(p, field, opt), 1e-12);
    EXPECT_NEAR(bearing_gap(opt, field, opt), 0.0, 1e-12);
  }
}

TEST(BearingGap, GradientEqualsObjectiveGradient) {
  std::mt19937_64 rng(52);
  const BeaconSnapshot field = fwguide::testing::random_field(rng, 6, 3);
  const Vec opt = weiszfeld(field).point;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = fwguide::testing::random_point(rng, 3);
    if (min_distance(p, field) < 0.1) continue;
    const Vec fd = fwguide::testing::fd_gradient(
        [&](const Vec& x) { return bearing_gap(x, field, opt); }, p);
    EXPECT_LE((fd - grad_f(p, field)).norm(), 1e-6);
  }
}

TEST(RateFit, RecoversExponent) {
  std::vector<double> t, d;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.1 * i);
    d.push_back(2.0 * std::exp(-0.7 * t.back()));
  }
  EXPECT_NEAR(rate_fit(t, d), -0.7, 1e-12);
}

TEST(SettlingTime, LastEntryIntoTolerance) {
  const Trajectory tr = synthetic({0, 1, 2, 3, 4, 5}, {1.0, 1e-7, 1e-3, 1e-7, 1e-8, 0.0});
  ASSERT_TRUE(settling_time(tr, 1e-6).has_value());
  EXPECT_DOUBLE_EQ(*settling_time(tr, 1e-6), 3.0);
  EXPECT_FALSE(settling_time(synthetic({0, 1}, {1.0, 0.5}), 1e-6).has_value());
}

TEST(UltimateBound, OnlySamplesAfterStart) {
  const Trajectory tr = synthetic({0, 1, 2, 3}, {5.0, 0.3, 0.1, 0.05});
  EXPECT_TRUE(ultimate_bound_check(tr, 0.2, 2.0));
  EXPECT_FALSE(ultimate_bound_check(tr, 0.2, 1.0));
  EXPECT_FALSE(ultimate_bound_check(tr, 0.2, 10.0));
}

TEST(Monotone, DetectsIncrease) {
  const MonotoneResult ok = monotone_check(synthetic({0, 1, 2}, {1, 1, 1}, {3, 2, 2}), 1e-9);
  EXPECT_TRUE(ok.monotone);
  const MonotoneResult bad = monotone_check(synthetic({0, 1, 2}, {1, 1, 1}, {3, 2, 2.5}), 1e-9);
  EXPECT_FALSE(bad.monotone);
  EXPECT_DOUBLE_EQ(bad.max_increase, 0.5);
}

TEST(Context, HexagonGeometry) {
  const AnalysisContext ctx = hexagon_context();
  EXPECT_LE(ctx.initial_optimum.norm(), 1e-9);
  EXPECT_NEAR(ctx.min_optimum_distance(), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(ctx.max_optimum_distance(), 2.0, 1e-9);
  EXPECT_NEAR(ctx.ball_radius(), std::sqrt(2.0) - 1e-3, 1e-9);

  Mat P = Mat::Zero(2, 2);
  for (const auto& pi : hexagon_field().initial_positions) P += proj(bearing(v2(0, 0), pi));
  EXPECT_LE((ctx.optimum_projection_sum() - P).norm(), 1e-9);
  EXPECT_NEAR(exponential_rate(ctx, 1.0), lambda_min(P) / 3.0, 1e-9);
}

TEST(StrongConvexity, BelowHessianAtOptimum) {
  const AnalysisContext ctx = hexagon_context();
  const double m = strong_convexity_constant(ctx, 21);
  EXPECT_GT(m, 0.0);
  EXPECT_LE(m, lambda_min(hessian_f(ctx.initial_optimum, ctx.field.snapshot(0.0))) + 1e-12);
}

TEST(NoisyBound, VanishesWithoutRotation) {
  AnalysisContext ctx = hexagon_context();
  ctx.noise.angles.assign(6, AngleSignal{});
  const std::vector<double> times{0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(noisy_ultimate_bound(ctx, times).bound, 0.0);

  ctx.noise.angles[0] = AngleSignal{AngleSignal::Kind::Constant, std::numbers::pi / 3, 0.0};
  const NoisyBound b = noisy_ultimate_bound(ctx, times, 0.5);
  EXPECT_NEAR(b.lambda, 0.5, 1e-15);
  const double expect = std::sqrt(2 * (1 - b.lambda) * b.f_star / ((1 - 0.5) * b.m * b.lambda));
  EXPECT_NEAR(b.bound, expect, 1e-12);
  EXPECT_NEAR(b.f_star, 4 * std::sqrt(2.0) + 4.0, 1e-9);
}

TEST(FiniteTimeBound, FormulaComponents) {
  AnalysisContext ctx = hexagon_context(LawKind::FiniteTime);
  ctx.law.gains.a = 0.3;
  const FiniteTimeBound b = finite_time_bound(ctx, 0.2);
  const Mat P = ctx.optimum_projection_sum();
  const double R = ctx.ball_radius();
  const double chi = lambda_min(P) * lambda_min(P) / (4 * lambda_max(P));
  const double h = (std::sqrt(2.0) - R) / std::pow(R + 2.0, 2);
  const double a = 0.3;
  const double kappa = std::pow(2.0, (1 - a) / 2) * std::pow(chi * h, (a + 1) / 2);
  const double T = 2 * std::pow(0.2, (1 - a) / 2) / (std::pow(kappa, (a + 1) / 2) * (1 - a));
  EXPECT_NEAR(b.chi, chi, 1e-12);
  EXPECT_NEAR(b.h, h, 1e-12);
  EXPECT_NEAR(b.kappa, kappa, 1e-12);
  EXPECT_NEAR(b.T, T, 1e-9 * T);
}

TEST(Lyapunov, DistanceIsHalfSquaredError) {
  const AnalysisContext ctx = hexagon_context();
  AgentState s;
  s.p = v2(0.3, -0.4);
  EXPECT_NEAR(lyap_value(LyapunovKind::Distance, s, ctx), 0.125, 1e-12);
}

TEST(Certify, GradientPresetPasses) {
  const Scenario sc = preset("sim1a-gradient");
  const SimConfig cfg = to_sim_config(sc);
  const AnalysisContext ctx = make_context(cfg);
  Trajectory tr = simulate(cfg);
  attach_lyapunov(tr, ctx);
  const CertificateReport rep = certify(tr, ctx, sc.certificate);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name;
  EXPECT_LT(rep.fitted_rate, 0.0);
}

TEST(Certify, CollisionFails) {
  SimConfig cfg;
  cfg.field = hexagon_field();
  cfg.p0 = v2(1.3, 1.3);
  cfg.eps_guard = 0.35;
  cfg.horizon = 5.0;
  const AnalysisContext ctx = make_context(cfg);
  Trajectory tr = simulate(cfg);
  attach_lyapunov(tr, ctx);
  EXPECT_FALSE(certify(tr, ctx, {}).passed());
}
