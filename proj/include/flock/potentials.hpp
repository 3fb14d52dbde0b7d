#pragma once

// Pairwise artificial potential V(d) = a ln(d^2) + b / d^2 and its sums over
// the complete position graph. V blows up as d -> 0 (collision barrier) and
// as d -> infinity (cohesion), with its unique minimum at d = sqrt(b / a).
//
// Only this (a, b) family is provided. Another radially unbounded potential
// with a unique minimum would slot in by replacing value() and
// pairwise_gradient() while keeping the same signatures.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "flock/errors.hpp"

namespace flock {

// Separations below this are reported as collisions instead of evaluated.
inline constexpr double kCollisionThreshold = 1e-9;

struct PotentialParams {
  double a = 0.5;
  double b = 2.5;

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw std::invalid_argument("potential coefficients a and b must be positive");
    }
  }

  bool operator==(const PotentialParams&) const = default;
};

inline void to_json(nlohmann::json& j, const PotentialParams& p) {
  j = nlohmann::json{{"a", p.a}, {"b", p.b}};
}

inline void from_json(const nlohmann::json& j, PotentialParams& p) {
  p.a = j.at("a").get<double>();
  p.b = j.at("b").get<double>();
  p.validate();
}

namespace potential {

inline double value(const PotentialParams& p, double d) {
  if (d < kCollisionThreshold) throw CollisionError(d);
  const double d2 = d * d;
  return p.a * std::log(d2) + p.b / d2;
}

inline double equilibrium_distance(const PotentialParams& p) { return std::sqrt(p.b / p.a); }

// dV/dd, used by scan oracles and tests.
inline double derivative(const PotentialParams& p, double d) {
  if (d < kCollisionThreshold) throw CollisionError(d);
  return 2.0 * p.a / d - 2.0 * p.b / (d * d * d);
}

// Gradient of V(|x_ij|) with respect to x_i: (2a/r^2 - 2b/r^4) x_ij. The
// scalar factor depends on |x_ij|^2 only, so negating x_ij negates the
// result exactly.
inline Eigen::VectorXd pairwise_gradient(const PotentialParams& p, const Eigen::VectorXd& xij) {
  const double r2 = xij.squaredNorm();
  if (r2 < kCollisionThreshold * kCollisionThreshold) throw CollisionError(std::sqrt(r2));
  const double inv_r2 = 1.0 / r2;
  const double factor = 2.0 * p.a * inv_r2 - 2.0 * p.b * inv_r2 * inv_r2;
  return factor * xij;
}

// Agent positions are rows of `positions`.
inline double total_potential(int i, const Eigen::MatrixXd& positions, const PotentialParams& p) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < positions.rows(); ++j) {
    if (j == i) continue;
    const double d = (positions.row(i) - positions.row(j)).norm();
    if (d < kCollisionThreshold) throw CollisionError(i, static_cast<int>(j), d);
    sum += value(p, d);
  }
  return sum;
}

inline Eigen::VectorXd total_gradient(int i, const Eigen::MatrixXd& positions,
                                      const PotentialParams& p) {
  const Eigen::Index dim = positions.cols();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index j = 0; j < positions.rows(); ++j) {
    if (j == i) continue;
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double dx = positions(i, k) - positions(j, k);
      r2 += dx * dx;
    }
    if (r2 < kCollisionThreshold * kCollisionThreshold) {
      throw CollisionError(i, static_cast<int>(j), std::sqrt(r2));
    }
    const double inv_r2 = 1.0 / r2;
    const double factor = 2.0 * p.a * inv_r2 - 2.0 * p.b * inv_r2 * inv_r2;
    for (Eigen::Index k = 0; k < dim; ++k) {
      g[k] += factor * (positions(i, k) - positions(j, k));
    }
  }
  return g;
}

// Row i holds total_gradient(i, positions, p).
inline Eigen::MatrixXd all_gradients(const Eigen::MatrixXd& positions, const PotentialParams& p) {
  Eigen::MatrixXd out(positions.rows(), positions.cols());
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    out.row(i) = total_gradient(static_cast<int>(i), positions, p).transpose();
  }
  return out;
}

}  // namespace potential
}  // namespace flock
