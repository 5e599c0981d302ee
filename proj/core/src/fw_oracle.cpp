#include "fwguide/fw_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fwguide {

namespace {

constexpr double kBeaconSnap = 1e-9;
constexpr double kEscapeStep = 1e-6;
constexpr double kFinalGridStep = 1e-7;
constexpr int kLocalHalfWidth = 3;
constexpr int kMaxSweeps = 1000;

void require_distinct(const BeaconSnapshot& field) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (std::size_t j = i + 1; j < field.size(); ++j) {
      if ((field.positions[i] - field.positions[j]).norm() < kCoincidenceTol) {
        throw std::invalid_argument("duplicate beacons " + std::to_string(i) + " and " +
                                    std::to_string(j));
      }
    }
  }
}

// Sum of w_i g_i over i != k, evaluated at beacon k.
Vec others_sum(std::size_t k, const BeaconSnapshot& field) {
  const Vec& pk = field.positions[k];
  Vec s = Vec::Zero(pk.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (i != k) s += field.weights[i] * bearing(pk, field.positions[i]);
  }
  return s;
}

// Visits every point lower + step * idx of a d-dimensional grid with
// counts[k] points along axis k.
template <typename Fn>
void for_each_grid_point(const Vec& lower, double step, const std::vector<int>& counts, Fn&& fn) {
  const int d = static_cast<int>(lower.size());
  std::vector<int> idx(d, 0);
  Vec p = lower;
  while (true) {
    for (int k = 0; k < d; ++k) p[k] = lower[k] + step * idx[k];
    fn(p);
    int k = 0;
    while (k < d && ++idx[k] >= counts[k]) {
      idx[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
}

}  // namespace

ExistenceReport existence_check(const BeaconSnapshot& field) {
  if (field.size() < 3) {
    throw std::invalid_argument("existence_check: need at least three beacons");
  }
  require_distinct(field);
  ExistenceReport report;
  report.margins.reserve(field.size());
  report.interior_minimum = true;
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double margin = others_sum(k, field).norm() - field.weights[k];
    report.margins.push_back(margin);
    if (!(margin > 0.0)) report.interior_minimum = false;
  }
  return report;
}

double residual(const Vec& p, const BeaconSnapshot& field) {
  return weighted_bearing_sum(p, field).norm();
}

Vec weighted_centroid(const BeaconSnapshot& field) {
  Vec c = Vec::Zero(field.dim());
  double wsum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    c += field.weights[i] * field.positions[i];
    wsum += field.weights[i];
  }
  return c / wsum;
}

Vec weiszfeld_step(const Vec& p, const BeaconSnapshot& field) {
  for (std::size_t k = 0; k < field.size(); ++k) {
    if ((p - field.positions[k]).norm() < kBeaconSnap) {
      const Vec dir = others_sum(k, field);
      const double n = dir.norm();
      if (n == 0.0) return p;
      return field.positions[k] + kEscapeStep * dir / n;
    }
  }
  Vec num = Vec::Zero(p.size());
  double den = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double c = field.weights[i] / (p - field.positions[i]).norm();
    num += c * field.positions[i];
    den += c;
  }
  return num / den;
}

FwSolution weiszfeld(const BeaconSnapshot& field, const WeiszfeldOptions& options) {
  FwSolution sol;
  sol.point = options.start ? *options.start : weighted_centroid(field);
  sol.residual = residual(sol.point, field);
  while (sol.residual > options.tol && sol.iterations < options.max_iter) {
    sol.point = weiszfeld_step(sol.point, field);
    sol.residual = residual(sol.point, field);
    ++sol.iterations;
  }
  sol.converged = sol.residual <= options.tol;
  return sol;
}

Box bounding_box(const BeaconSnapshot& field, double margin) {
  Box box{field.positions.front(), field.positions.front()};
  for (const auto& p : field.positions) {
    box.lower = box.lower.cwiseMin(p);
    box.upper = box.upper.cwiseMax(p);
  }
  box.lower.array() -= margin;
  box.upper.array() += margin;
  return box;
}

FwSolution brute_force(const BeaconSnapshot& field, const Box& box, double coarse_step,
                       int refinements) {
  if (!(coarse_step > 0.0)) throw std::invalid_argument("brute_force: coarse_step must be > 0");
  const int d = static_cast<int>(box.lower.size());

  Vec best = box.lower;
  double best_f = std::numeric_limits<double>::infinity();
  auto visit = [&](const Vec& p) {
    const double f = objective(p, field);
    if (f < best_f) {
      best_f = f;
      best = p;
    }
  };

  std::vector<int> counts(d);
  for (int k = 0; k < d; ++k) {
    counts[k] = static_cast<int>(std::floor((box.upper[k] - box.lower[k]) / coarse_step)) + 1;
  }
  for_each_grid_point(box.lower, coarse_step, counts, visit);

  FwSolution sol;
  double step = coarse_step;
  const std::vector<int> local(d, 2 * kLocalHalfWidth + 1);
  int rounds = 0;
  while (rounds < refinements || step > kFinalGridStep) {
    step *= 0.5;
    // Re-centre on the incumbent until it stops moving at this step.
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      const Vec centre = best;
      const Vec lower = centre.array() - kLocalHalfWidth * step;
      for_each_grid_point(lower, step, local, visit);
      if (best == centre) break;
    }
    ++rounds;
  }
  sol.point = best;
  sol.iterations = rounds;
  sol.residual = residual(best, field);
  sol.converged = true;
  return sol;
}

}  // namespace fwguide
