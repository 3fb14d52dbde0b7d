#pragma once

// Point-mass agents driven by a velocity-consensus term over a weighted
// digraph plus the gradient of the pairwise potential over all other agents.
//
//   x_i' = v_i
//   m_i v_i' = u_i             (no damping)
//   m_i v_i' = u_i - k_i v_i   (damped)
//
// Control laws:
//   WeightedConsensus  u_i = -sum_j w_ij (v_i - v_j) - grad_i V_i
//   UnitConsensus      same with every nonzero w_ij replaced by 1
//   MassScaled         u_i = -m_i sum_j w_ij (v_i - v_j) - m_i grad_i V_i
// A compensated controller adds k_i v_i to u_i so the drag cancels.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "flock/graphs.hpp"
#include "flock/potentials.hpp"

namespace flock {

struct AgentParams {
  double mass = 1.0;          // kg
  double damping_gain = 0.0;  // kg/s

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("agent mass must be positive");
    if (!(damping_gain >= 0.0) || !std::isfinite(damping_gain)) {
      throw std::invalid_argument("agent damping gain must be nonnegative");
    }
  }

  bool operator==(const AgentParams&) const = default;
};

// Agent i occupies row i of positions and velocities.
struct SwarmState {
  double time = 0.0;
  Matrix positions;
  Matrix velocities;

  int count() const { return static_cast<int>(positions.rows()); }
  int dimension() const { return static_cast<int>(positions.cols()); }

  bool is_finite() const { return positions.allFinite() && velocities.allFinite(); }

  void validate() const {
    if (positions.rows() < 1 || positions.cols() < 1) {
      throw std::invalid_argument("state needs at least one agent and one dimension");
    }
    if (positions.rows() != velocities.rows() || positions.cols() != velocities.cols()) {
      throw std::invalid_argument("positions and velocities must have the same shape");
    }
    if (!is_finite()) throw std::invalid_argument("state entries must be finite");
  }
};

struct StateDerivative {
  Matrix position_rate;
  Matrix velocity_rate;
};

enum class ControlLaw { WeightedConsensus, UnitConsensus, MassScaled };
enum class DampingModel { None, Damped };

struct ControlSpec {
  ControlLaw law = ControlLaw::WeightedConsensus;
  DampingModel damping = DampingModel::None;
  bool compensated = false;

  void validate() const {
    if (compensated && damping != DampingModel::Damped) {
      throw std::invalid_argument("drag compensation requires the damped model");
    }
  }

  bool drag_acts() const { return damping == DampingModel::Damped && !compensated; }

  bool operator==(const ControlSpec&) const = default;
};

// CLI and file spellings: eq6 / eq14 / eq15 and none / raw / compensated.
inline std::string_view to_string(ControlLaw law) {
  switch (law) {
    case ControlLaw::WeightedConsensus: return "eq6";
    case ControlLaw::UnitConsensus: return "eq14";
    case ControlLaw::MassScaled: return "eq15";
  }
  return "eq6";
}

inline ControlLaw parse_control_law(std::string_view s) {
  if (s == "eq6") return ControlLaw::WeightedConsensus;
  if (s == "eq14") return ControlLaw::UnitConsensus;
  if (s == "eq15") return ControlLaw::MassScaled;
  throw std::invalid_argument("unknown control law '" + std::string(s) + "' (expected eq6, eq14 or eq15)");
}

inline std::string_view damping_mode(const ControlSpec& c) {
  if (c.damping == DampingModel::None) return "none";
  return c.compensated ? "compensated" : "raw";
}

inline void apply_damping_mode(ControlSpec& c, std::string_view s) {
  if (s == "none") {
    c.damping = DampingModel::None;
    c.compensated = false;
  } else if (s == "raw") {
    c.damping = DampingModel::Damped;
    c.compensated = false;
  } else if (s == "compensated") {
    c.damping = DampingModel::Damped;
    c.compensated = true;
  } else {
    throw std::invalid_argument("unknown damping mode '" + std::string(s) +
                                "' (expected none, raw or compensated)");
  }
}

class Swarm {
 public:
  Swarm(std::vector<AgentParams> agents, WeightedDigraph velocity_graph, PotentialParams potential,
        ControlSpec control, int dimension = 2)
      : agents_(std::move(agents)),
        velocity_graph_(std::move(velocity_graph)),
        potential_(potential),
        control_(control),
        dimension_(dimension) {
    if (agents_.empty()) throw std::invalid_argument("swarm needs at least one agent");
    if (static_cast<int>(agents_.size()) != velocity_graph_.size()) {
      throw std::invalid_argument("agent count must equal velocity graph size");
    }
    if (dimension_ < 1) throw std::invalid_argument("dimension must be >= 1");
    for (const auto& a : agents_) a.validate();
    potential_.validate();
    control_.validate();
    coupling_ = control_.law == ControlLaw::UnitConsensus ? velocity_graph_.unit_weights()
                                                          : velocity_graph_;
  }

  int count() const { return static_cast<int>(agents_.size()); }
  int dimension() const { return dimension_; }
  const std::vector<AgentParams>& agents() const { return agents_; }
  const AgentParams& agent(int i) const { return agents_[static_cast<std::size_t>(i)]; }
  const WeightedDigraph& velocity_graph() const { return velocity_graph_; }
  // Gains actually used by the consensus term (unit weights for UnitConsensus).
  const WeightedDigraph& coupling_graph() const { return coupling_; }
  const PotentialParams& potential() const { return potential_; }
  const ControlSpec& control() const { return control_; }

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : agents_) m += a.mass;
    return m;
  }

  Vector masses() const {
    Vector m(count());
    for (int i = 0; i < count(); ++i) m[i] = agents_[static_cast<std::size_t>(i)].mass;
    return m;
  }

 private:
  std::vector<AgentParams> agents_;
  WeightedDigraph velocity_graph_;
  WeightedDigraph coupling_;
  PotentialParams potential_;
  ControlSpec control_;
  int dimension_;
};

struct Violation {
  std::string assumption;
  std::string detail;
};

// Checks the standing assumptions on the velocity graph: weight balance and
// weak connectivity. An empty result means both hold.
inline std::vector<Violation> validate(const Swarm& sw, double tol = kDefaultBalanceTol) {
  std::vector<Violation> out;
  const auto& g = sw.coupling_graph();
  if (!is_weight_balanced(g, tol)) {
    for (int i = 0; i < g.size(); ++i) {
      const double gap = g.out_degree(i) - g.in_degree(i);
      if (std::abs(gap) > tol) {
        out.push_back({"weight balance", "vertex " + std::to_string(i) + " out-weight minus in-weight = " +
                                             std::to_string(gap)});
      }
    }
  }
  if (!is_weakly_connected(g)) {
    const auto label = weak_components(g);
    const int components = *std::max_element(label.begin(), label.end()) + 1;
    out.push_back({"weak connectivity",
                   "velocity graph has " + std::to_string(components) + " weak components"});
  }
  return out;
}

namespace detail {

inline void check_state(const SwarmState& s, const Swarm& sw) {
  if (s.count() != sw.count() || s.dimension() != sw.dimension()) {
    throw std::invalid_argument("state shape does not match swarm (agents x dimension)");
  }
}

// alpha_i + beta_i for every agent: consensus plus potential terms, without
// any drag or drag compensation.
inline Matrix coordination_forces(const SwarmState& s, const Swarm& sw) {
  check_state(s, sw);
  const int n = sw.count();
  const int dim = sw.dimension();
  const auto& w = sw.coupling_graph();
  Matrix u = -potential::all_gradients(s.positions, sw.potential());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wij = w.weight(i, j);
      if (wij <= 0.0) continue;
      for (int k = 0; k < dim; ++k) u(i, k) -= wij * (s.velocities(i, k) - s.velocities(j, k));
    }
  }
  if (sw.control().law == ControlLaw::MassScaled) {
    for (int i = 0; i < n; ++i) u.row(i) *= sw.agent(i).mass;
  }
  return u;
}

}  // namespace detail

// Control input u_i of every agent (rows), including the +k_i v_i
// compensation when it is enabled.
inline Matrix control_forces(const SwarmState& s, const Swarm& sw) {
  Matrix u = detail::coordination_forces(s, sw);
  if (sw.control().compensated) {
    for (int i = 0; i < sw.count(); ++i) u.row(i) += sw.agent(i).damping_gain * s.velocities.row(i);
  }
  return u;
}

inline Vector control_force(int i, const SwarmState& s, const Swarm& sw) {
  if (i < 0 || i >= sw.count()) throw std::out_of_range("agent index out of range");
  return control_forces(s, sw).row(i).transpose();
}

// With compensation the drag and the added +k_i v_i cancel analytically, so
// the net force is the coordination force itself. It is not formed as
// (u + k v) - k v, which keeps the compensated derivative bit-identical to
// the undamped one.
inline StateDerivative state_derivative(const SwarmState& s, const Swarm& sw) {
  Matrix net = detail::coordination_forces(s, sw);
  if (sw.control().drag_acts()) {
    for (int i = 0; i < sw.count(); ++i) net.row(i) -= sw.agent(i).damping_gain * s.velocities.row(i);
  }
  for (int i = 0; i < sw.count(); ++i) net.row(i) /= sw.agent(i).mass;
  return {s.velocities, std::move(net)};
}

}  // namespace flock
