#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flock/analysis.hpp"
#include "flock/dynamics.hpp"
#include "flock/errors.hpp"

namespace flock {

struct SimConfig {
  double dt = 0.005;             // s
  double t_end = 200.0;          // s
  int record_stride = 20;
  double collision_epsilon = 1e-3 * std::sqrt(5.0);  // m
  double consensus_tol = 1e-3;   // m/s

  // Collision guard placed at 1e-3 of the equilibrium spacing.
  static SimConfig defaults_for(const PotentialParams& p) {
    SimConfig c;
    c.collision_epsilon = 1e-3 * potential::equilibrium_distance(p);
    return c;
  }

  void validate() const {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("dt and t_end must be positive");
    if (dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    if (!(collision_epsilon > 0.0)) throw std::invalid_argument("collision_epsilon must be positive");
    if (!(consensus_tol > 0.0)) throw std::invalid_argument("consensus_tol must be positive");
  }

  long long steps() const { return std::llround(t_end / dt); }

  bool operator==(const SimConfig&) const = default;
};

enum class TerminalStatus { Completed, CollisionAbort, NumericAbort };

inline std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::Completed: return "completed";
    case TerminalStatus::CollisionAbort: return "collision_abort";
    case TerminalStatus::NumericAbort: return "numeric_abort";
  }
  return "completed";
}

inline TerminalStatus parse_terminal_status(std::string_view s) {
  if (s == "completed") return TerminalStatus::Completed;
  if (s == "collision_abort") return TerminalStatus::CollisionAbort;
  if (s == "numeric_abort") return TerminalStatus::NumericAbort;
  throw std::invalid_argument("unknown terminal status '" + std::string(s) + "'");
}

struct Sample {
  SwarmState state;  // state.time is the sample time
  MetricsRecord metrics;

  double time() const { return state.time; }
};

struct Trajectory {
  std::vector<Sample> samples;
  TerminalStatus status = TerminalStatus::Completed;
  std::string abort_reason;
  // Last state reached, recorded or not (the offending state on abort).
  SwarmState final_state;
};

// One classical fourth-order Runge-Kutta step.
inline SwarmState rk4_step(const SwarmState& s, const Swarm& sw, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step needs dt > 0");
  auto stage = [&](const StateDerivative& d, double h) {
    SwarmState t;
    t.time = s.time + h;
    t.positions = s.positions + h * d.position_rate;
    t.velocities = s.velocities + h * d.velocity_rate;
    return t;
  };
  const StateDerivative k1 = state_derivative(s, sw);
  const StateDerivative k2 = state_derivative(stage(k1, 0.5 * dt), sw);
  const StateDerivative k3 = state_derivative(stage(k2, 0.5 * dt), sw);
  const StateDerivative k4 = state_derivative(stage(k3, dt), sw);

  SwarmState next;
  next.time = s.time + dt;
  next.positions = s.positions + (dt / 6.0) * (k1.position_rate + 2.0 * k2.position_rate +
                                               2.0 * k3.position_rate + k4.position_rate);
  next.velocities = s.velocities + (dt / 6.0) * (k1.velocity_rate + 2.0 * k2.velocity_rate +
                                                 2.0 * k3.velocity_rate + k4.velocity_rate);
  return next;
}

// Integrates from s0 to cfg.t_end with a fixed step, recording every
// record_stride steps (the initial state included). Sample times are step * dt
// rather than an accumulated sum.
inline Trajectory run(const Swarm& sw, const SwarmState& s0, const SimConfig& cfg) {
  cfg.validate();
  s0.validate();
  if (s0.count() != sw.count() || s0.dimension() != sw.dimension()) {
    throw std::invalid_argument("initial state shape does not match swarm");
  }

  Trajectory tr;
  tr.final_state = s0;
  const double lam2 = analysis::lambda2_or_zero(sw);
  const bool pairs = sw.count() >= 2;

  auto too_close = [&](const SwarmState& s) {
    return pairs && analysis::min_pairwise_distance(s) <= cfg.collision_epsilon;
  };

  if (too_close(s0)) {
    tr.status = TerminalStatus::CollisionAbort;
    tr.abort_reason = "initial separation at or below collision_epsilon";
    return tr;
  }

  const double t0 = s0.time;
  tr.samples.push_back({s0, analysis::metrics(s0, sw, lam2)});

  SwarmState s = s0;
  const long long steps = cfg.steps();
  for (long long step = 1; step <= steps; ++step) {
    try {
      s = rk4_step(s, sw, cfg.dt);
    } catch (const CollisionError& e) {
      tr.status = TerminalStatus::CollisionAbort;
      tr.abort_reason = e.what();
      return tr;
    }
    s.time = t0 + static_cast<double>(step) * cfg.dt;
    tr.final_state = s;
    if (!s.is_finite()) {
      tr.status = TerminalStatus::NumericAbort;
      tr.abort_reason = "non-finite state at t = " + std::to_string(s.time);
      return tr;
    }
    if (too_close(s)) {
      tr.status = TerminalStatus::CollisionAbort;
      tr.abort_reason = "separation fell to collision_epsilon at t = " + std::to_string(s.time);
      return tr;
    }
    if (step % cfg.record_stride == 0) {
      tr.samples.push_back({s, analysis::metrics(s, sw, lam2)});
    }
  }
  return tr;
}

// Earliest sample time after which the dispersion stays within tol up to the
// end of the run. Only defined for completed runs.
inline std::optional<double> detect_consensus(const Trajectory& tr, double tol) {
  if (tr.status != TerminalStatus::Completed || tr.samples.empty()) return std::nullopt;
  std::optional<double> since;
  for (auto it = tr.samples.rbegin(); it != tr.samples.rend(); ++it) {
    if (it->metrics.dispersion > tol) break;
    since = it->time();
  }
  return since;
}

// Dispersion at or below tol over the last `fraction` of the samples.
inline bool is_converged(const Trajectory& tr, double tol = 1e-4, double fraction = 0.1) {
  if (tr.status != TerminalStatus::Completed || tr.samples.empty()) return false;
  const auto n = tr.samples.size();
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  for (std::size_t k = n - tail; k < n; ++k) {
    if (tr.samples[k].metrics.dispersion > tol) return false;
  }
  return true;
}

}  // namespace flock
