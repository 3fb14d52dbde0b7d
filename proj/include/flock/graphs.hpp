#pragma once

// Velocity-information digraph (weighted, directed) and the complete position
// graph: Laplacians, balance and connectivity predicates, spectra and a
// generator for exactly balanced random digraphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "flock/rng.hpp"

namespace flock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IncidenceMatrix = Eigen::MatrixXi;

inline constexpr double kDefaultBalanceTol = 1e-9;

// Weighted digraph on n vertices. weights(i, j) > 0 means agent i senses the
// velocity of agent j with gain w_ij; the neighbor set of i is {j : w_ij > 0}.
class WeightedDigraph {
 public:
  WeightedDigraph() : WeightedDigraph(Matrix::Zero(1, 1)) {}

  explicit WeightedDigraph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() < 1 || weights_.rows() != weights_.cols()) {
      throw std::invalid_argument("weight matrix must be square with n >= 1");
    }
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
      for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
        const double w = weights_(i, j);
        if (!std::isfinite(w) || w < 0.0) {
          throw std::invalid_argument("weight w[" + std::to_string(i) + "][" +
                                      std::to_string(j) +
                                      "] must be finite and nonnegative");
        }
        if (i == j && w != 0.0) {
          throw std::invalid_argument("self-loop weight w[" + std::to_string(i) +
                                      "][" + std::to_string(i) + "] must be 0");
        }
      }
    }
  }

  static WeightedDigraph empty(int n) { return WeightedDigraph(Matrix::Zero(n, n)); }

  // Directed cycle 0 -> 1 -> ... -> n-1 -> 0 with a single weight.
  static WeightedDigraph cycle(int n, double weight = 1.0) {
    Matrix w = Matrix::Zero(n, n);
    if (n > 1) {
      for (int i = 0; i < n; ++i) w(i, (i + 1) % n) = weight;
    }
    return WeightedDigraph(std::move(w));
  }

  int size() const { return static_cast<int>(weights_.rows()); }
  double weight(int i, int j) const { return weights_(i, j); }
  bool has_arc(int i, int j) const { return weights_(i, j) > 0.0; }
  const Matrix& weights() const { return weights_; }

  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j) {
      if (has_arc(i, j)) out.push_back(j);
    }
    return out;
  }

  double out_degree(int i) const { return weights_.row(i).sum(); }
  double in_degree(int i) const { return weights_.col(i).sum(); }

  // Same arc set, every arc weight replaced by 1.
  WeightedDigraph unit_weights() const {
    return WeightedDigraph((weights_.array() > 0.0).cast<double>().matrix());
  }

  bool operator==(const WeightedDigraph& other) const {
    return weights_.rows() == other.weights_.rows() && weights_ == other.weights_;
  }

 private:
  Matrix weights_;
};

inline void to_json(nlohmann::json& j, const WeightedDigraph& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < g.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < g.size(); ++k) row.push_back(g.weight(i, k));
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"n", g.size()}, {"weights", std::move(rows)}};
}

inline void from_json(const nlohmann::json& j, WeightedDigraph& g) {
  const int n = j.at("n").get<int>();
  const auto& rows = j.at("weights");
  if (n < 1 || !rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw std::invalid_argument("weights must be an n x n array");
  }
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("weights row " + std::to_string(i) +
                                  " must have n entries");
    }
    for (int k = 0; k < n; ++k) w(i, k) = row.at(k).get<double>();
  }
  g = WeightedDigraph(std::move(w));
}

// L = Delta_out - W. Diagonal entries are computed as the row sum of the
// off-diagonal weights so each row of L sums to exactly zero.
inline Matrix laplacian(const WeightedDigraph& g) {
  const int n = g.size();
  Matrix l = -g.weights();
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k != i) off += l(i, k);
    }
    l(i, i) = -off;
  }
  return l;
}

// Every vertex carries equal total incoming and outgoing weight.
inline bool is_weight_balanced(const WeightedDigraph& g, double tol = kDefaultBalanceTol) {
  if (tol < 0.0) throw std::invalid_argument("balance tolerance must be >= 0");
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(g.out_degree(i) - g.in_degree(i)) > tol) return false;
  }
  return true;
}

// Labels of the weak components (components of the symmetrized arc set),
// numbered 0, 1, ... in order of their lowest vertex.
inline std::vector<int> weak_components(const WeightedDigraph& g) {
  const int n = g.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (int root = 0; root < n; ++root) {
    if (label[root] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(root);
    label[root] = next;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int u = 0; u < n; ++u) {
        if (label[u] < 0 && (g.has_arc(v, u) || g.has_arc(u, v))) {
          label[u] = next;
          frontier.push(u);
        }
      }
    }
    ++next;
  }
  return label;
}

inline bool is_weakly_connected(const WeightedDigraph& g) {
  const auto label = weak_components(g);
  return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

// Tarjan's algorithm.
inline int strongly_connected_component_count(const WeightedDigraph& g) {
  const int n = g.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0;
  int components = 0;

  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int u = 0; u < n; ++u) {
      if (!g.has_arc(v, u)) continue;
      if (index[u] < 0) {
        visit(u);
        low[v] = std::min(low[v], low[u]);
      } else if (on_stack[u]) {
        low[v] = std::min(low[v], index[u]);
      }
    }
    if (low[v] == index[v]) {
      int u = -1;
      do {
        u = stack.back();
        stack.pop_back();
        on_stack[u] = false;
      } while (u != v);
      ++components;
    }
  };

  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return components;
}

inline bool is_strongly_connected(const WeightedDigraph& g) {
  return strongly_connected_component_count(g) == 1;
}

// For a weight-balanced digraph weak and strong connectivity coincide. Returns
// whether that equivalence holds for g; throws if g is not balanced.
inline bool verify_proposition1(const WeightedDigraph& g, double tol = kDefaultBalanceTol) {
  if (!is_weight_balanced(g, tol)) {
    throw std::invalid_argument("equivalence check requires a weight-balanced digraph");
  }
  return is_weakly_connected(g) == is_strongly_connected(g);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> symmetric_eigenvalues(const Matrix& s, double tol = 1e-9) {
  if (s.rows() != s.cols()) throw std::invalid_argument("matrix must be square");
  const Eigen::Index n = s.rows();
  if (n > 0 && (s - s.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("matrix is not symmetric within tolerance");
  }
  Matrix a = 0.5 * (s + s.transpose());

  constexpr double kOffDiagonalStop = 1e-12;
  constexpr int kMaxSweeps = 100;
  const double scale = std::max(1.0, a.norm());

  auto off_norm = [&] {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) sum += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(sum);
  };

  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > kOffDiagonalStop * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  std::vector<double> eig(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// Second-smallest eigenvalue of L + L^T. Positive for balanced, weakly
// connected graphs; governs the decay rate of velocity disagreement.
inline double lambda2(const WeightedDigraph& g) {
  if (g.size() < 2) throw std::invalid_argument("lambda2 needs at least two vertices");
  const Matrix l = laplacian(g);
  return symmetric_eigenvalues(l + l.transpose())[1];
}

// Incidence matrix of the complete graph K_n. Edges are enumerated (0,1),
// (0,2), ..., (n-2,n-1); each is oriented from the lower to the higher index,
// so the column holds -1 at the tail and +1 at the head.
inline IncidenceMatrix complete_incidence(int n) {
  if (n < 1) throw std::invalid_argument("complete_incidence needs n >= 1");
  IncidenceMatrix b = IncidenceMatrix::Zero(n, n * (n - 1) / 2);
  int edge = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      b(i, edge) = -1;
      b(j, edge) = 1;
      ++edge;
    }
  }
  return b;
}

// Superposition of random directed simple cycles. The first cycle visits
// every vertex in random order, which makes the result strongly connected;
// the remaining cycles - 1 run through random subsets of at least two
// vertices. Each cycle carries one uniform weight in (0, 1), so every vertex
// gains equal in- and out-weight from it. If overlapping cycles push an arc
// to 1 or above, the whole matrix is rescaled, which keeps it balanced.
inline WeightedDigraph random_balanced_connected(int n, int cycles, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_balanced_connected needs n >= 2");
  if (cycles < 1) throw std::invalid_argument("random_balanced_connected needs cycles >= 1");
  Rng rng(seed, Stream::Graph);
  Matrix w = Matrix::Zero(n, n);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int c = 0; c < cycles; ++c) {
    rng.shuffle(order);
    const int length = c == 0 ? n : rng.integer(2, n);
    const double weight = rng.uniform();
    for (int k = 0; k < length; ++k) {
      w(order[k], order[(k + 1) % length]) += weight;
    }
  }

  const double largest = w.maxCoeff();
  if (largest >= 1.0) w *= 0.999 / largest;
  return WeightedDigraph(std::move(w));
}

}  // namespace flock
