#pragma once

// CSV export and re-import of trajectories and their metrics.
//
// Trajectory CSV: header "t,agent,x_1,...,x_n,v_1,...,v_n", one row per
// agent per sample (agents numbered from 0), then a footer line
// "# terminal_status: <completed|collision_abort|numeric_abort>".
//
// Metrics CSV: header
// "t,J,Jdot,Jstar,dispersion,min_dist,com_v_1,...,com_v_n,avg_v_1,...,avg_v_n,bound_slack",
// one row per sample, same footer.
//
// Numbers are written in shortest round-trip form.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "flock/analysis.hpp"
#include "flock/errors.hpp"
#include "flock/simulate.hpp"

namespace flock::io {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trajectory_header(int dim) {
  std::string h = "t,agent";
  for (int k = 1; k <= dim; ++k) h += ",x_" + std::to_string(k);
  for (int k = 1; k <= dim; ++k) h += ",v_" + std::to_string(k);
  return h;
}

inline std::string metrics_header(int dim) {
  std::string h = "t,J,Jdot,Jstar,dispersion,min_dist";
  for (int k = 1; k <= dim; ++k) h += ",com_v_" + std::to_string(k);
  for (int k = 1; k <= dim; ++k) h += ",avg_v_" + std::to_string(k);
  return h + ",bound_slack";
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const Trajectory& tr, const std::string& path) {
  out << "# terminal_status: " << to_string(tr.status) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline int trajectory_dimension(const Trajectory& tr) {
  if (!tr.samples.empty()) return tr.samples.front().state.dimension();
  return tr.final_state.positions.cols() > 0 ? static_cast<int>(tr.final_state.positions.cols()) : 1;
}

}  // namespace detail

inline void export_trajectory(const Trajectory& tr, const std::string& path) {
  const int dim = detail::trajectory_dimension(tr);
  auto out = detail::open_for_write(path);
  out << trajectory_header(dim) << '\n';
  for (const auto& sample : tr.samples) {
    const auto& s = sample.state;
    for (int i = 0; i < s.count(); ++i) {
      out << format_double(s.time) << ',' << i;
      for (int k = 0; k < dim; ++k) out << ',' << format_double(s.positions(i, k));
      for (int k = 0; k < dim; ++k) out << ',' << format_double(s.velocities(i, k));
      out << '\n';
    }
  }
  detail::finish(out, tr, path);
}

inline void export_metrics(const Trajectory& tr, const std::string& path) {
  const int dim = detail::trajectory_dimension(tr);
  auto out = detail::open_for_write(path);
  out << metrics_header(dim) << '\n';
  for (const auto& sample : tr.samples) {
    const auto& m = sample.metrics;
    out << format_double(sample.time()) << ',' << format_double(m.energy_J) << ','
        << format_double(m.energy_rate_analytic) << ',' << format_double(m.error_energy_Jstar) << ','
        << format_double(m.dispersion) << ',' << format_double(m.min_distance);
    for (int k = 0; k < dim; ++k) out << ',' << format_double(m.com_velocity[k]);
    for (int k = 0; k < dim; ++k) out << ',' << format_double(m.average_velocity[k]);
    out << ',' << format_double(m.rate_bound_slack) << '\n';
  }
  detail::finish(out, tr, path);
}

// States read back from a trajectory CSV, without metrics.
struct LoadedTrajectory {
  std::vector<SwarmState> states;
  TerminalStatus status = TerminalStatus::Completed;
};

inline LoadedTrajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  auto bad = [&](int line, const std::string& what) {
    return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
  };
  auto parse_double = [&](const std::string& field, int line) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw bad(line, "malformed number '" + field + "'");
    }
    return v;
  };

  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw bad(1, "missing header");
  int dim = 0;
  {
    std::istringstream hs(line);
    std::string col;
    int cols = 0;
    while (std::getline(hs, col, ',')) ++cols;
    dim = (cols - 2) / 2;
    if (dim < 1 || line != trajectory_header(dim)) throw bad(1, "unexpected header '" + line + "'");
  }

  LoadedTrajectory out;
  std::vector<std::vector<double>> rows;
  double current_t = 0.0;
  auto flush = [&]() {
    if (rows.empty()) return;
    SwarmState s;
    s.time = current_t;
    const auto n = static_cast<Eigen::Index>(rows.size());
    s.positions.resize(n, dim);
    s.velocities.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k < dim; ++k) {
        s.positions(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        s.velocities(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(dim + k)];
      }
    }
    out.states.push_back(std::move(s));
    rows.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# terminal_status: ";
      if (line.rfind(key, 0) == 0) out.status = parse_terminal_status(line.substr(key.size()));
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != 2 + 2 * dim) throw bad(lineno, "wrong column count");
    const double t = parse_double(fields[0], lineno);
    const int agent = static_cast<int>(parse_double(fields[1], lineno));
    if (agent == 0) {
      flush();
      current_t = t;
    } else if (t != current_t || agent != static_cast<int>(rows.size())) {
      throw bad(lineno, "rows out of order");
    }
    std::vector<double> values;
    for (std::size_t c = 2; c < fields.size(); ++c) values.push_back(parse_double(fields[c], lineno));
    rows.push_back(std::move(values));
  }
  flush();
  return out;
}

// Rebuilds a trajectory with metrics from bare states.
inline Trajectory with_metrics(const LoadedTrajectory& loaded, const Swarm& sw) {
  Trajectory tr;
  tr.status = loaded.status;
  const double lam2 = analysis::lambda2_or_zero(sw);
  for (const auto& s : loaded.states) {
    if (s.count() != sw.count() || s.dimension() != sw.dimension()) {
      throw std::invalid_argument("trajectory shape does not match the scenario");
    }
    tr.samples.push_back({s, analysis::metrics(s, sw, lam2)});
  }
  if (!tr.samples.empty()) tr.final_state = tr.samples.back().state;
  return tr;
}

}  // namespace flock::io
