#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flock/flock.hpp"

namespace support {

inline flock::Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  const auto n = static_cast<Eigen::Index>(r.size());
  const auto m = static_cast<Eigen::Index>(r.begin()->size());
  flock::Matrix out(n, m);
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index k = 0;
    for (double v : row) out(i, k++) = v;
    ++i;
  }
  return out;
}

inline flock::SwarmState state(flock::Matrix positions, flock::Matrix velocities, double t = 0.0) {
  flock::SwarmState s;
  s.time = t;
  s.positions = std::move(positions);
  s.velocities = std::move(velocities);
  return s;
}

inline flock::ControlSpec control(flock::ControlLaw law, const std::string& damping = "none") {
  flock::ControlSpec c;
  c.law = law;
  flock::apply_damping_mode(c, damping);
  return c;
}

inline flock::Swarm swarm(std::vector<double> masses, flock::WeightedDigraph g,
                          flock::ControlSpec c = {}, int dim = 2, std::vector<double> damping = {}) {
  std::vector<flock::AgentParams> agents;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    agents.push_back({masses[i], damping.empty() ? 0.0 : damping[i]});
  }
  return flock::Swarm(std::move(agents), std::move(g), flock::PotentialParams{}, c, dim);
}

// Equilateral triangle with side equal to the reference equilibrium distance.
inline flock::Matrix equilateral_triangle() {
  const double d = std::sqrt(5.0);
  return rows({{0, 0}, {d, 0}, {d / 2, d * std::sqrt(3.0) / 2}});
}

// Random swarm on a balanced strongly connected graph with masses and gains
// in (0.1, 1.1) and a random state whose agents sit at least `separation` apart.
struct RandomCase {
  flock::Swarm swarm;
  flock::SwarmState state;
};

inline RandomCase random_case(std::mt19937_64& gen, flock::ControlSpec c, int n = 0, int dim = 0,
                              double separation = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (n == 0) n = 2 + static_cast<int>(gen() % 7);
  if (dim == 0) dim = 1 + static_cast<int>(gen() % 3);
  std::vector<flock::AgentParams> agents;
  for (int i = 0; i < n; ++i) agents.push_back({0.1 + u(gen), 0.1 + u(gen)});
  flock::Swarm sw(agents, flock::random_balanced_connected(n, 1 + static_cast<int>(gen() % n), gen()),
                  flock::PotentialParams{}, c, dim);
  flock::SwarmState s;
  s.positions.resize(n, dim);
  s.velocities.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    for (;;) {
      for (int k = 0; k < dim; ++k) s.positions(i, k) = 4.0 * separation * n * (u(gen) - 0.5);
      bool ok = true;
      for (int j = 0; j < i; ++j) ok = ok && (s.positions.row(i) - s.positions.row(j)).norm() > separation;
      if (ok) break;
    }
    for (int k = 0; k < dim; ++k) s.velocities(i, k) = 6.0 * (u(gen) - 0.5);
  }
  return {std::move(sw), std::move(s)};
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("flock-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace support
