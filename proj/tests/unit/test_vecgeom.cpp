#include <gtest/gtest.h>

#include <random>

#include "fwguide/presets.hpp"
#include "fwguide/vecgeom.hpp"
#include "oracles.hpp"

using namespace fwguide;
using fwguide::testing::fd_gradient;
using fwguide::testing::fd_jacobian;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

BeaconSnapshot hexagon() { return hexagon_field().snapshot(0.0); }

}  // namespace

TEST(Bearing, UnitLengthAndDirection) {
  const Bearing g = bearing(v2(0, 0), v2(3, 4));
  EXPECT_NEAR(g.norm(), 1.0, 1e-15);
  EXPECT_NEAR(g[0], 0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.8, 1e-15);
}

TEST(Bearing, CoincidentPointsGiveZero) {
  const Bearing g = bearing(v2(1, 1), v2(1, 1));
  EXPECT_EQ(g.size(), 2);
  EXPECT_EQ(g.norm(), 0.0);
}

TEST(Projection, IdempotentSymmetricAnnihilatesBearing) {
  std::mt19937_64 rng(3);
  for (int d = 2; d <= 3; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const Bearing g = fwguide::testing::random_point(rng, d).normalized();
      const Mat P = proj(g);
      EXPECT_LT((P * P - P).norm(), 1e-14);
      EXPECT_LT((P - P.transpose()).norm(), 1e-15);
      EXPECT_LT((P * g).norm(), 1e-15);
      EXPECT_NEAR(P.trace(), d - 1.0, 1e-14);
    }
  }
}

TEST(Projection, ZeroBearingThrows) { EXPECT_THROW(proj(Vec::Zero(2)), std::invalid_argument); }

TEST(Objective, HexagonValueAtOrigin) {
  // Four beacons at distance sqrt(2) and two at distance 2.
  EXPECT_NEAR(objective(v2(0, 0), hexagon()), 4 * std::sqrt(2.0) + 4.0, 1e-14);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 2;
    const BeaconSnapshot field = fwguide::testing::random_field(rng, 3 + trial % 6, d);
    const Vec p = fwguide::testing::random_point(rng, d);
    if (min_distance(p, field) < 0.1) continue;
    const Vec fd = fd_gradient([&](const Vec& x) { return objective(x, field); }, p);
    worst = std::max(worst, (grad_f(p, field) - fd).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Gradient, IsNegatedBearingSum) {
  std::mt19937_64 rng(12);
  const BeaconSnapshot field = fwguide::testing::random_field(rng, 5, 3);
  const Vec p = fwguide::testing::random_point(rng, 3);
  EXPECT_EQ(grad_f(p, field), Vec(-weighted_bearing_sum(p, field)));
}

TEST(Hessian, MatchesFiniteDifferencesOfGradient) {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 2;
    const BeaconSnapshot field = fwguide::testing::random_field(rng, 3 + trial % 6, d);
    const Vec p = fwguide::testing::random_point(rng, d);
    if (min_distance(p, field) < 0.1) continue;
    const Mat fd = fd_jacobian([&](const Vec& x) { return grad_f(x, field); }, p);
    worst = std::max(worst, (hessian_f(p, field) - fd).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Hessian, PositiveSemidefiniteAndThrowsOnBeacon) {
  const BeaconSnapshot field = hexagon();
  EXPECT_GT(lambda_min(hessian_f(v2(0.2, -0.3), field)), 0.0);
  EXPECT_THROW(hessian_f(v2(1, 1), field), std::invalid_argument);
}

TEST(Eigenvalues, DiagonalMatrix) {
  Mat m = Mat::Zero(3, 3);
  m.diagonal() << 2.0, -1.0, 5.0;
  EXPECT_DOUBLE_EQ(lambda_min(m), -1.0);
  EXPECT_DOUBLE_EQ(lambda_max(m), 5.0);
}

TEST(Distances, MinAndMax) {
  EXPECT_NEAR(min_distance(v2(0, 0), hexagon()), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(max_distance(v2(0, 0), hexagon()), 2.0, 1e-15);
}
