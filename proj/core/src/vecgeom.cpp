#include "fwguide/vecgeom.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fwguide {

Vec zero_vec(int d) { return Vec::Zero(d); }

Bearing bearing(const Vec& from, const Vec& to) {
  Vec diff = to - from;
  const double n = diff.norm();
  if (n < kCoincidenceTol) {
    return Vec::Zero(from.size());
  }
  return diff / n;
}

Mat proj(const Bearing& g) {
  const double n = g.norm();
  if (n < kCoincidenceTol) {
    throw std::invalid_argument("proj: zero bearing has no projection matrix");
  }
  const Vec unit = g / n;
  return Mat::Identity(g.size(), g.size()) - unit * unit.transpose();
}

double objective(const Vec& p, const BeaconSnapshot& field) {
  double f = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    f += field.weights[i] * (p - field.positions[i]).norm();
  }
  return f;
}

Vec weighted_bearing_sum(const Vec& p, const BeaconSnapshot& field) {
  Vec sum = Vec::Zero(p.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    sum += field.weights[i] * bearing(p, field.positions[i]);
  }
  return sum;
}

Vec grad_f(const Vec& p, const BeaconSnapshot& field) {
  return -weighted_bearing_sum(p, field);
}

Mat hessian_f(const Vec& p, const BeaconSnapshot& field) {
  Mat h = Mat::Zero(p.size(), p.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec z = field.positions[i] - p;
    const double d = z.norm();
    if (d < kCoincidenceTol) {
      throw std::invalid_argument("hessian_f: point coincides with a beacon");
    }
    h += field.weights[i] * proj(z / d) / d;
  }
  return h;
}

Mat weighted_projection_sum(const Vec& p, const BeaconSnapshot& field) {
  Mat s = Mat::Zero(p.size(), p.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Bearing g = bearing(p, field.positions[i]);
    if (g.squaredNorm() > 0.0) {
      s += field.weights[i] * proj(g);
    }
  }
  return s;
}

double min_distance(const Vec& p, const BeaconSnapshot& field) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pi : field.positions) m = std::min(m, (pi - p).norm());
  return m;
}

double max_distance(const Vec& p, const BeaconSnapshot& field) {
  double m = 0.0;
  for (const auto& pi : field.positions) m = std::max(m, (pi - p).norm());
  return m;
}

double lambda_min(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace fwguide
