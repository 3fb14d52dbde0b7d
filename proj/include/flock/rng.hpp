#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace flock {

// Independent random streams derived from one 64-bit seed. Each consumer
// (graph, positions, velocities, ...) takes its own stream id so changing how
// many draws one of them makes never shifts the others.
enum class Stream : std::uint64_t {
  Graph = 1,
  Positions = 2,
  Velocities = 3,
  Masses = 4,
  Damping = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter * 0xD1B54A32D192ED03ULL));
}

// mt19937_64 output is fixed by the standard; the real-valued transforms are
// written out here so results do not depend on the library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream)
      : engine_(derive_seed(seed, static_cast<std::uint64_t>(stream))) {}

  std::uint64_t next() { return engine_(); }

  // Open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
      for (int k = 0; k < dim; ++k) v[k] = normal();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

  // Uniform point in the closed ball of the given radius.
  Eigen::VectorXd in_ball(int dim, double radius) {
    const double r = radius * std::pow(uniform(), 1.0 / dim);
    return r * unit_vector(dim);
  }

  template <typename T>
  void shuffle(T& range) {
    const auto n = static_cast<int>(range.size());
    for (int i = n - 1; i > 0; --i) {
      const int j = integer(0, i);
      std::swap(range[i], range[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flock
