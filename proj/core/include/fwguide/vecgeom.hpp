#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace fwguide {

// Vectors carry their dimension at run time but never allocate: d <= 3.
inline constexpr int kMaxDim = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

// A bearing is a unit vector, or exactly zero when the two points coincide.
using Bearing = Vec;

// Points closer than this are treated as coincident.
inline constexpr double kCoincidenceTol = 1e-12;

// Beacon positions and weights frozen at one instant.
struct BeaconSnapshot {
  std::vector<Vec> positions;
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  int dim() const { return positions.empty() ? 0 : static_cast<int>(positions.front().size()); }
};

Vec zero_vec(int d);

/// Unit vector pointing from `from` to `to`; the zero vector when they coincide.
Bearing bearing(const Vec& from, const Vec& to);

/// I - g g^T. Throws std::invalid_argument for a zero bearing.
Mat proj(const Bearing& g);

/// f(p) = sum_i w_i |p - p_i|.
double objective(const Vec& p, const BeaconSnapshot& field);

/// sum_i w_i g_i(p), with g_i = 0 for a beacon located at p.
Vec weighted_bearing_sum(const Vec& p, const BeaconSnapshot& field);

/// Gradient of the objective, -sum_i w_i g_i.
Vec grad_f(const Vec& p, const BeaconSnapshot& field);

/// sum_i w_i P_{g_i} / d_i. Throws std::invalid_argument if p sits on a beacon.
Mat hessian_f(const Vec& p, const BeaconSnapshot& field);

/// sum_i w_i P_{g_i} evaluated at p (no distance scaling).
Mat weighted_projection_sum(const Vec& p, const BeaconSnapshot& field);

double min_distance(const Vec& p, const BeaconSnapshot& field);
double max_distance(const Vec& p, const BeaconSnapshot& field);

// Extreme eigenvalues of a symmetric matrix.
double lambda_min(const Mat& symmetric);
double lambda_max(const Mat& symmetric);

}  // namespace fwguide
