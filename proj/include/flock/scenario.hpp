#pragma once

// Scenario files: JSON documents describing agents, the velocity graph (an
// explicit weight matrix or a generator spec), the potential, the control
// law and the integrator settings.
//
//   {
//     "schema_version": 1,
//     "dimension": 2,
//     "agents": [{"mass": 0.4, "damping_gain": 0.2,
//                 "position": [1.0, 2.0], "velocity": [0.5, -3.0]}, ...],
//     "velocity_graph": {"n": 10, "weights": [[...], ...]},
//       or "graph_generator": {"n": 10, "cycles": 10, "seed": 7},
//     "potential": {"a": 0.5, "b": 2.5},
//     "control": {"law": "eq6", "damping": "none"},
//     "sim": {"dt": 0.005, "t_end": 200, "record_stride": 20,
//             "collision_epsilon": 0.002236, "consensus_tol": 0.001}
//   }
//
// "control" and "sim" are optional on input and always written on output.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "flock/dynamics.hpp"
#include "flock/graphs.hpp"
#include "flock/potentials.hpp"
#include "flock/rng.hpp"
#include "flock/simulate.hpp"

namespace flock {

inline constexpr int kScenarioSchemaVersion = 1;

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { Parse, Schema, Io };

  ScenarioError(Kind kind, std::string message, int line = 0, std::string field = {})
      : std::runtime_error(format(kind, message, line, field)),
        kind_(kind),
        line_(line),
        field_(std::move(field)) {}

  Kind kind() const { return kind_; }
  // 1-based source line, 0 when unknown.
  int line() const { return line_; }
  // JSON pointer of the offending field, empty when not applicable.
  const std::string& field() const { return field_; }

 private:
  static std::string format(Kind kind, const std::string& message, int line, const std::string& field) {
    std::string out = kind == Kind::Parse ? "parse error" : kind == Kind::Schema ? "schema error" : "I/O error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " (" + field + ")";
    return out + ": " + message;
  }

  Kind kind_;
  int line_;
  std::string field_;
};

struct AgentSpec {
  AgentParams params;
  std::vector<double> position;
  std::vector<double> velocity;

  bool operator==(const AgentSpec&) const = default;
};

struct GraphGenerator {
  int n = 2;
  int cycles = 1;
  std::uint64_t seed = 0;

  bool operator==(const GraphGenerator&) const = default;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  int dimension = 2;
  std::vector<AgentSpec> agents;
  std::variant<WeightedDigraph, GraphGenerator> graph;
  PotentialParams potential;
  ControlSpec control;
  SimConfig sim;

  WeightedDigraph velocity_graph() const {
    if (const auto* g = std::get_if<WeightedDigraph>(&graph)) return *g;
    const auto& gen = std::get<GraphGenerator>(graph);
    return random_balanced_connected(gen.n, gen.cycles, gen.seed);
  }

  Swarm swarm() const {
    std::vector<AgentParams> params;
    params.reserve(agents.size());
    for (const auto& a : agents) params.push_back(a.params);
    return Swarm(std::move(params), velocity_graph(), potential, control, dimension);
  }

  SwarmState initial_state() const {
    const auto n = static_cast<Eigen::Index>(agents.size());
    SwarmState s;
    s.positions.resize(n, dimension);
    s.velocities.resize(n, dimension);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& a = agents[static_cast<std::size_t>(i)];
      for (int k = 0; k < dimension; ++k) {
        s.positions(i, k) = a.position.at(static_cast<std::size_t>(k));
        s.velocities(i, k) = a.velocity.at(static_cast<std::size_t>(k));
      }
    }
    return s;
  }

  bool operator==(const ScenarioConfig&) const = default;
};

// Random scenario in the style of the reference planar experiments: positions
// uniform in the radius-15 ball, speeds uniform in (0, 10) with uniform
// directions, masses uniform in (0, 1), damping gains uniform in (0, 1) and a
// balanced strongly connected velocity graph with weights in (0, 1). Every
// quantity draws from its own stream of `seed`.
inline ScenarioConfig generate_scenario(int agents, int dimension, std::uint64_t seed) {
  if (agents < 2) throw std::invalid_argument("generate_scenario needs at least two agents");
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  constexpr double kBallRadius = 15.0;
  constexpr double kMaxSpeed = 10.0;

  ScenarioConfig cfg;
  cfg.dimension = dimension;
  cfg.graph = GraphGenerator{agents, agents, seed};
  cfg.sim = SimConfig::defaults_for(cfg.potential);

  Rng positions(seed, Stream::Positions);
  Rng velocities(seed, Stream::Velocities);
  Rng masses(seed, Stream::Masses);
  Rng damping(seed, Stream::Damping);
  for (int i = 0; i < agents; ++i) {
    AgentSpec a;
    a.params.mass = masses.uniform();
    a.params.damping_gain = damping.uniform();
    const Vector x = positions.in_ball(dimension, kBallRadius);
    const Vector v = velocities.uniform(0.0, kMaxSpeed) * velocities.unit_vector(dimension);
    a.position.assign(x.data(), x.data() + dimension);
    a.velocity.assign(v.data(), v.data() + dimension);
    cfg.agents.push_back(std::move(a));
  }
  return cfg;
}

// Shifts all velocities so the centre of mass starts at rest.
inline void remove_com_velocity(ScenarioConfig& cfg) {
  const Swarm sw = cfg.swarm();
  const Vector v_star = analysis::com_velocity(cfg.initial_state(), sw);
  for (auto& a : cfg.agents) {
    for (int k = 0; k < cfg.dimension; ++k) a.velocity[static_cast<std::size_t>(k)] -= v_star[k];
  }
}

inline nlohmann::json to_json(const ScenarioConfig& cfg) {
  using nlohmann::json;
  json agents = json::array();
  for (const auto& a : cfg.agents) {
    agents.push_back(json{{"mass", a.params.mass},
                          {"damping_gain", a.params.damping_gain},
                          {"position", a.position},
                          {"velocity", a.velocity}});
  }
  json doc{{"schema_version", cfg.schema_version},
           {"dimension", cfg.dimension},
           {"agents", std::move(agents)},
           {"potential", cfg.potential},
           {"control", json{{"law", std::string(to_string(cfg.control.law))},
                            {"damping", std::string(damping_mode(cfg.control))}}},
           {"sim", json{{"dt", cfg.sim.dt},
                        {"t_end", cfg.sim.t_end},
                        {"record_stride", cfg.sim.record_stride},
                        {"collision_epsilon", cfg.sim.collision_epsilon},
                        {"consensus_tol", cfg.sim.consensus_tol}}}};
  if (const auto* g = std::get_if<WeightedDigraph>(&cfg.graph)) {
    doc["velocity_graph"] = *g;
  } else {
    const auto& gen = std::get<GraphGenerator>(cfg.graph);
    doc["graph_generator"] = json{{"n", gen.n}, {"cycles", gen.cycles}, {"seed", gen.seed}};
  }
  return doc;
}

namespace detail {

// Source lines of every JSON pointer seen while parsing.
class LineMap {
 public:
  void record(const std::string& pointer, int line) { lines_.try_emplace(pointer, line); }

  // Line of the pointer, or of its nearest recorded ancestor.
  int line_of(std::string pointer) const {
    while (true) {
      if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
      if (pointer.empty()) return 0;
      pointer.erase(pointer.rfind('/'));
    }
  }

 private:
  std::map<std::string, int> lines_;
};

struct LineCounter {
  int line = 1;
  int token_line = 1;  // line of the last non-whitespace character consumed
};

// Forward iterator over the document text that counts lines as the JSON lexer
// consumes characters.
class CountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, LineCounter* counter) : p_(p), counter_(counter) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    if (*p_ == '\n') {
      ++counter_->line;
    } else if (*p_ != ' ' && *p_ != '\t' && *p_ != '\r') {
      counter_->token_line = counter_->line;
    }
    ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  LineCounter* counter_ = nullptr;
};

inline std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

inline nlohmann::json parse_with_lines(const std::string& text, LineMap& lines) {
  using nlohmann::json;
  struct Frame {
    bool is_array;
    std::size_t index = 0;
    std::string key;
  };
  LineCounter counter;
  std::vector<Frame> frames;

  auto slot = [&]() {
    std::string path;
    for (const auto& f : frames) {
      path += '/';
      path += f.is_array ? std::to_string(f.index) : escape_pointer_token(f.key);
    }
    return path;
  };
  auto advance = [&]() {
    if (!frames.empty() && frames.back().is_array) ++frames.back().index;
  };

  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start:
        lines.record(slot(), counter.token_line);
        frames.push_back({event == json::parse_event_t::array_start, 0, {}});
        break;
      case json::parse_event_t::key:
        frames.back().key = parsed.get<std::string>();
        lines.record(slot(), counter.token_line);
        break;
      case json::parse_event_t::value:
        lines.record(slot(), counter.token_line);
        advance();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        frames.pop_back();
        advance();
        break;
    }
    return true;
  };

  const char* begin = text.data();
  const char* end = text.data() + text.size();
  try {
    return json::parse(CountingIterator(begin, &counter), CountingIterator(end, &counter), cb);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::Parse, e.what(), counter.line);
  }
}

class SchemaReader {
 public:
  explicit SchemaReader(const LineMap& lines) : lines_(lines) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ScenarioError(ScenarioError::Kind::Schema, message, lines_.line_of(pointer), pointer);
  }

  const nlohmann::json& member(const nlohmann::json& obj, const std::string& base, const std::string& key) const {
    if (!obj.is_object()) fail(base, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(base, "missing required field '" + key + "'");
    return *it;
  }

  double number(const nlohmann::json& v, const std::string& pointer) const {
    if (!v.is_number()) fail(pointer, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(pointer, "expected a finite number");
    return d;
  }

  double positive(const nlohmann::json& v, const std::string& pointer) const {
    const double d = number(v, pointer);
    if (!(d > 0.0)) fail(pointer, "must be positive");
    return d;
  }

  double nonnegative(const nlohmann::json& v, const std::string& pointer) const {
    const double d = number(v, pointer);
    if (!(d >= 0.0)) fail(pointer, "must be nonnegative");
    return d;
  }

  int integer(const nlohmann::json& v, const std::string& pointer, int min) const {
    if (!v.is_number_integer()) fail(pointer, "expected an integer");
    const auto i = v.get<long long>();
    if (i < min) fail(pointer, "must be >= " + std::to_string(min));
    return static_cast<int>(i);
  }

  std::vector<double> vector(const nlohmann::json& v, const std::string& pointer, int dim) const {
    if (!v.is_array()) fail(pointer, "expected an array");
    if (static_cast<int>(v.size()) != dim) {
      fail(pointer, "expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], pointer + "/" + std::to_string(k)));
    return out;
  }

  std::string string(const nlohmann::json& v, const std::string& pointer) const {
    if (!v.is_string()) fail(pointer, "expected a string");
    return v.get<std::string>();
  }

 private:
  const LineMap& lines_;
};

}  // namespace detail

inline ScenarioConfig parse_scenario(const std::string& text) {
  detail::LineMap lines;
  const nlohmann::json doc = detail::parse_with_lines(text, lines);
  const detail::SchemaReader r(lines);
  if (!doc.is_object()) r.fail("", "scenario must be a JSON object");

  ScenarioConfig cfg;
  cfg.schema_version = r.integer(r.member(doc, "", "schema_version"), "/schema_version", 1);
  if (cfg.schema_version != kScenarioSchemaVersion) {
    r.fail("/schema_version", "unsupported schema version " + std::to_string(cfg.schema_version));
  }
  cfg.dimension = r.integer(r.member(doc, "", "dimension"), "/dimension", 1);

  const auto& agents = r.member(doc, "", "agents");
  if (!agents.is_array() || agents.empty()) r.fail("/agents", "expected a nonempty array of agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string base = "/agents/" + std::to_string(i);
    const auto& a = agents[i];
    AgentSpec spec;
    spec.params.mass = r.positive(r.member(a, base, "mass"), base + "/mass");
    spec.params.damping_gain = a.contains("damping_gain")
                                   ? r.nonnegative(a["damping_gain"], base + "/damping_gain")
                                   : 0.0;
    spec.position = r.vector(r.member(a, base, "position"), base + "/position", cfg.dimension);
    spec.velocity = r.vector(r.member(a, base, "velocity"), base + "/velocity", cfg.dimension);
    cfg.agents.push_back(std::move(spec));
  }
  const int n_agents = static_cast<int>(cfg.agents.size());

  const bool has_weights = doc.contains("velocity_graph");
  const bool has_generator = doc.contains("graph_generator");
  if (has_weights == has_generator) {
    r.fail("", has_weights ? "velocity_graph and graph_generator are mutually exclusive"
                           : "one of velocity_graph or graph_generator is required");
  }
  if (has_weights) {
    const auto& g = doc["velocity_graph"];
    const int n = r.integer(r.member(g, "/velocity_graph", "n"), "/velocity_graph/n", 1);
    if (n != n_agents) r.fail("/velocity_graph/n", "graph size must equal the number of agents");
    const auto& rows = r.member(g, "/velocity_graph", "weights");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      r.fail("/velocity_graph/weights", "expected an n x n array");
    }
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
      const std::string rp = "/velocity_graph/weights/" + std::to_string(i);
      const auto row = r.vector(rows[static_cast<std::size_t>(i)], rp, n);
      for (int k = 0; k < n; ++k) {
        if (!(row[static_cast<std::size_t>(k)] >= 0.0)) r.fail(rp + "/" + std::to_string(k), "weight must be nonnegative");
        if (i == k && row[static_cast<std::size_t>(k)] != 0.0) r.fail(rp + "/" + std::to_string(k), "self-loop weight must be 0");
        w(i, k) = row[static_cast<std::size_t>(k)];
      }
    }
    cfg.graph = WeightedDigraph(std::move(w));
  } else {
    const auto& g = doc["graph_generator"];
    GraphGenerator gen;
    gen.n = r.integer(r.member(g, "/graph_generator", "n"), "/graph_generator/n", 2);
    if (gen.n != n_agents) r.fail("/graph_generator/n", "graph size must equal the number of agents");
    gen.cycles = r.integer(r.member(g, "/graph_generator", "cycles"), "/graph_generator/cycles", 1);
    const auto& seed = r.member(g, "/graph_generator", "seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      r.fail("/graph_generator/seed", "expected a nonnegative integer");
    }
    gen.seed = seed.get<std::uint64_t>();
    cfg.graph = gen;
  }

  const auto& pot = r.member(doc, "", "potential");
  cfg.potential.a = r.positive(r.member(pot, "/potential", "a"), "/potential/a");
  cfg.potential.b = r.positive(r.member(pot, "/potential", "b"), "/potential/b");

  if (doc.contains("control")) {
    const auto& c = doc["control"];
    try {
      if (c.contains("law")) cfg.control.law = parse_control_law(r.string(c["law"], "/control/law"));
    } catch (const std::invalid_argument& e) {
      r.fail("/control/law", e.what());
    }
    try {
      if (c.contains("damping")) apply_damping_mode(cfg.control, r.string(c["damping"], "/control/damping"));
    } catch (const std::invalid_argument& e) {
      r.fail("/control/damping", e.what());
    }
  }

  cfg.sim = SimConfig::defaults_for(cfg.potential);
  if (doc.contains("sim")) {
    const auto& s = doc["sim"];
    if (s.contains("dt")) cfg.sim.dt = r.positive(s["dt"], "/sim/dt");
    if (s.contains("t_end")) cfg.sim.t_end = r.positive(s["t_end"], "/sim/t_end");
    if (s.contains("record_stride")) cfg.sim.record_stride = r.integer(s["record_stride"], "/sim/record_stride", 1);
    if (s.contains("collision_epsilon")) {
      cfg.sim.collision_epsilon = r.positive(s["collision_epsilon"], "/sim/collision_epsilon");
    }
    if (s.contains("consensus_tol")) cfg.sim.consensus_tol = r.positive(s["consensus_tol"], "/sim/consensus_tol");
    if (cfg.sim.dt > cfg.sim.t_end) r.fail("/sim/dt", "dt must not exceed t_end");
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioError::Kind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ScenarioError(ScenarioError::Kind::Io, "failed reading '" + path + "'");
  return parse_scenario(buf.str());
}

inline void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ScenarioError(ScenarioError::Kind::Io, "cannot open '" + path + "' for writing");
  out << to_json(cfg).dump(2) << '\n';
  if (!out) throw ScenarioError(ScenarioError::Kind::Io, "failed writing '" + path + "'");
}

}  // namespace flock
