#pragma once

#include <optional>
#include <vector>

#include "fwguide/vecgeom.hpp"

namespace fwguide {

struct FwSolution {
  Vec point;
  double residual = 0.0;  // |sum_i w_i g_i| at point
  int iterations = 0;
  bool converged = false;
};

// Evaluates, at every beacon p_k, |sum_{i != k} w_i g_i| - w_k. A unique
// interior minimiser exists iff every margin is positive.
struct ExistenceReport {
  std::vector<double> margins;
  bool interior_minimum = false;
};

/// Throws std::invalid_argument for fewer than three beacons or duplicates.
ExistenceReport existence_check(const BeaconSnapshot& field);

/// |sum_i w_i g_i(p)| with the zero-bearing convention at beacons.
double residual(const Vec& p, const BeaconSnapshot& field);

/// Weighted centroid sum_i w_i p_i / sum_i w_i.
Vec weighted_centroid(const BeaconSnapshot& field);

struct WeiszfeldOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  std::optional<Vec> start;  // weighted centroid when empty
};

/// One fixed-point update p <- (sum w_i/d_i)^-1 sum (w_i/d_i) p_i. When p lies
/// within 1e-9 of a beacon the iterate is instead pushed 1e-6 along the
/// descent direction of the remaining terms.
Vec weiszfeld_step(const Vec& p, const BeaconSnapshot& field);

FwSolution weiszfeld(const BeaconSnapshot& field, const WeiszfeldOptions& options = {});

struct Box {
  Vec lower;
  Vec upper;
};

/// Axis-aligned box around the beacons, grown by `margin` on every side.
Box bounding_box(const BeaconSnapshot& field, double margin = 0.0);

/// Grid search of the objective over `box`, then repeated refinement on a
/// local grid around the incumbent with the step halved each round. The
/// step keeps halving past `refinements` until it is at most 1e-7.
FwSolution brute_force(const BeaconSnapshot& field, const Box& box, double coarse_step,
                       int refinements);

}  // namespace fwguide
