#pragma once

// Monitors evaluated on swarm states: energies and their analytic rates,
// conserved averages, centre-of-mass error coordinates and the lambda2 bound
// on the error-energy decay.
//
// The ln term of the potential is negative for separations below 1, so J and
// J* are not sign-definite here. Everything downstream checks rates and
// monotonicity, never the sign of J itself.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "flock/dynamics.hpp"
#include "flock/errors.hpp"
#include "flock/graphs.hpp"
#include "flock/potentials.hpp"

namespace flock {

struct MetricsRecord {
  double energy_J = 0.0;
  double energy_rate_analytic = 0.0;
  Vector com_velocity;
  Vector average_velocity;
  double dispersion = 0.0;
  double min_distance = 0.0;
  double error_energy_Jstar = 0.0;
  double rate_bound_slack = 0.0;
};

// Positions and velocities relative to the centre of mass.
struct ErrorState {
  Matrix e_positions;
  Matrix e_velocities;
};

namespace analysis {

namespace detail {

// Kinetic-energy weights: physical masses, or 1 for the mass-scaled law whose
// Lyapunov function uses a unit-mass kinetic term.
inline double kinetic_weight(const Swarm& sw, int i) {
  return sw.control().law == ControlLaw::MassScaled ? 1.0 : sw.agent(i).mass;
}

// x^T ((L + L^T) (x) I_n) x / 2 = sum_i sum_j w_ij x_i . (x_i - x_j).
inline double laplacian_form(const WeightedDigraph& g, const Matrix& x) {
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      const double w = g.weight(i, j);
      if (w > 0.0) sum += w * x.row(i).dot(x.row(i) - x.row(j));
    }
  }
  return sum;
}

inline Vector weighted_mean(const Matrix& rows, const Vector& weights) {
  return (weights.transpose() * rows).transpose() / weights.sum();
}

}  // namespace detail

// J = 1/2 sum_i (V_i + m_i |v_i|^2). Each pair potential is counted twice in
// sum_i V_i, so the potential part equals the sum over unordered pairs.
inline double total_energy(const SwarmState& s, const Swarm& sw) {
  double sum = 0.0;
  for (int i = 0; i < s.count(); ++i) {
    sum += potential::total_potential(i, s.positions, sw.potential());
    sum += detail::kinetic_weight(sw, i) * s.velocities.row(i).squaredNorm();
  }
  return 0.5 * sum;
}

// dJ/dt along the flow, in closed form:
//   -1/2 v^T ((L + L^T) (x) I_n) v            consensus dissipation
//   - sum_i k_i |v_i|^2                         uncompensated drag
// For the mass-scaled law the drag term becomes - sum_i (k_i / m_i) |v_i|^2
// because its energy carries unit masses.
inline double energy_rate(const SwarmState& s, const Swarm& sw) {
  double rate = -detail::laplacian_form(sw.coupling_graph(), s.velocities);
  if (sw.control().drag_acts()) {
    for (int i = 0; i < s.count(); ++i) {
      const auto& a = sw.agent(i);
      const double k = sw.control().law == ControlLaw::MassScaled ? a.damping_gain / a.mass
                                                                  : a.damping_gain;
      rate -= k * s.velocities.row(i).squaredNorm();
    }
  }
  return rate;
}

inline Vector com_velocity(const SwarmState& s, const Swarm& sw) {
  return detail::weighted_mean(s.velocities, sw.masses());
}

inline Vector com_position(const SwarmState& s, const Swarm& sw) {
  return detail::weighted_mean(s.positions, sw.masses());
}

inline Vector average_velocity(const SwarmState& s) {
  return s.velocities.colwise().mean().transpose();
}

// Final common velocity implied by the conserved quantity of the law in force:
// the mass-weighted initial mean for the consensus laws, the plain mean for
// the mass-scaled law, and rest when drag acts uncompensated.
inline Vector predicted_final_velocity(const SwarmState& s0, const Swarm& sw) {
  if (sw.control().drag_acts()) return Vector::Zero(s0.dimension());
  if (!is_weakly_connected(sw.coupling_graph())) {
    throw NoPredictionError(
        "velocity graph is not weakly connected: each component settles on its own velocity");
  }
  if (sw.control().law == ControlLaw::MassScaled) return average_velocity(s0);
  return com_velocity(s0, sw);
}

inline ErrorState error_state(const SwarmState& s, const Swarm& sw) {
  const Vector m = sw.masses();
  const Vector x_star = detail::weighted_mean(s.positions, m);
  const Vector v_star = detail::weighted_mean(s.velocities, m);
  return {s.positions.rowwise() - x_star.transpose(), s.velocities.rowwise() - v_star.transpose()};
}

// J* = 1/2 sum_i (V_i + m_i |e_v,i|^2). The potential only sees differences,
// so it is evaluated on the original positions.
inline double error_energy(const SwarmState& s, const Swarm& sw) {
  const ErrorState e = error_state(s, sw);
  double sum = 0.0;
  for (int i = 0; i < s.count(); ++i) {
    sum += potential::total_potential(i, s.positions, sw.potential());
    sum += sw.agent(i).mass * e.e_velocities.row(i).squaredNorm();
  }
  return 0.5 * sum;
}

// dJ*/dt = -1/2 e_v^T ((L + L^T) (x) I_n) e_v for the undamped weighted law on
// a balanced graph.
inline double error_energy_rate(const SwarmState& s, const Swarm& sw) {
  return -detail::laplacian_form(sw.coupling_graph(), error_state(s, sw).e_velocities);
}

// (-lambda2 e_v^T e_v) - dJ*/dt. Nonnegative values certify
// dJ*/dt <= -lambda2 e_v^T e_v at this state.
inline double rate_bound_slack(const SwarmState& s, const Swarm& sw, double lambda_2) {
  const double ev2 = error_state(s, sw).e_velocities.squaredNorm();
  return -lambda_2 * ev2 - error_energy_rate(s, sw);
}

inline double rate_bound_slack(const SwarmState& s, const Swarm& sw) {
  return rate_bound_slack(s, sw, lambda2(sw.coupling_graph()));
}

// Slack of the Rayleigh-quotient bound dJ*/dt <= -(lambda2 / 2) |P e_v|^2,
// where P removes the unweighted mean of e_v along each axis. This holds for
// every state on a balanced graph.
inline double projected_rate_bound_slack(const SwarmState& s, const Swarm& sw, double lambda_2) {
  const Matrix ev = error_state(s, sw).e_velocities;
  const Matrix projected = ev.rowwise() - ev.colwise().mean();
  return -0.5 * lambda_2 * projected.squaredNorm() - error_energy_rate(s, sw);
}

// Largest pairwise velocity difference.
inline double velocity_dispersion(const SwarmState& s) {
  double worst = 0.0;
  for (int i = 0; i < s.count(); ++i)
    for (int j = i + 1; j < s.count(); ++j)
      worst = std::max(worst, (s.velocities.row(i) - s.velocities.row(j)).norm());
  return worst;
}

// Dispersion restricted to agents sharing a component label.
inline double component_dispersion(const SwarmState& s, const std::vector<int>& labels, int component) {
  double worst = 0.0;
  for (int i = 0; i < s.count(); ++i) {
    if (labels[static_cast<std::size_t>(i)] != component) continue;
    for (int j = i + 1; j < s.count(); ++j) {
      if (labels[static_cast<std::size_t>(j)] != component) continue;
      worst = std::max(worst, (s.velocities.row(i) - s.velocities.row(j)).norm());
    }
  }
  return worst;
}

inline double min_pairwise_distance(const SwarmState& s) {
  if (s.count() < 2) throw std::invalid_argument("min_pairwise_distance needs at least two agents");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.count(); ++i)
    for (int j = i + 1; j < s.count(); ++j)
      best = std::min(best, (s.positions.row(i) - s.positions.row(j)).norm());
  return best;
}

inline double max_speed(const SwarmState& s) {
  return s.velocities.rowwise().norm().maxCoeff();
}

// Full record for one sample. lambda_2 is passed in so a run computes the
// spectrum once.
inline MetricsRecord metrics(const SwarmState& s, const Swarm& sw, double lambda_2) {
  MetricsRecord r;
  r.energy_J = total_energy(s, sw);
  r.energy_rate_analytic = energy_rate(s, sw);
  r.com_velocity = com_velocity(s, sw);
  r.average_velocity = average_velocity(s);
  r.dispersion = velocity_dispersion(s);
  r.min_distance = s.count() >= 2 ? min_pairwise_distance(s) : std::numeric_limits<double>::infinity();
  r.error_energy_Jstar = error_energy(s, sw);
  r.rate_bound_slack = rate_bound_slack(s, sw, lambda_2);
  return r;
}

inline double lambda2_or_zero(const Swarm& sw) {
  return sw.count() >= 2 ? lambda2(sw.coupling_graph()) : 0.0;
}

}  // namespace analysis
}  // namespace flock
