#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Polynomial with ascending coefficients: p(x) = c[0] + c[1] x + ...
using Poly = std::vector<double>;

inline double eval(const Poly& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
  return d;
}

// det(x I - A) by the Faddeev-LeVerrier recursion.
inline Poly characteristic_polynomial(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Poly c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

struct Root {
  double x;
  int multiplicity;
};

// Real roots of a polynomial whose roots are all real, found by splitting the
// line at the critical points (roots of p') and bisecting each monotone piece.
// A critical point where p vanishes is a multiple root.
inline std::vector<Root> real_roots(const Poly& p) {
  const int deg = static_cast<int>(p.size()) - 1;
  if (deg <= 0) return {};
  if (deg == 1) return {{-p[0] / p[1], 1}};

  double bound = 0.0;
  for (int k = 0; k < deg; ++k) bound = std::max(bound, std::abs(p[static_cast<std::size_t>(k)] / p.back()));
  bound += 1.0;
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));

  const auto crit = real_roots(derivative(p));
  auto is_zero = [&](double x) {
    return std::abs(eval(p, x)) <= 1e-10 * scale * std::pow(std::max(1.0, std::abs(x)), deg);
  };

  std::vector<Root> out;
  std::vector<double> breaks{-bound};
  std::vector<bool> break_is_root{false};
  for (const auto& c : crit) {
    breaks.push_back(c.x);
    const bool root = is_zero(c.x);
    break_is_root.push_back(root);
    if (root) out.push_back({c.x, c.multiplicity + 1});
  }
  breaks.push_back(bound);
  break_is_root.push_back(false);

  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (break_is_root[k] || break_is_root[k + 1]) continue;
    double lo = breaks[k], hi = breaks[k + 1];
    double flo = eval(p, lo);
    const double fhi = eval(p, hi);
    if (!(flo * fhi < 0.0)) continue;
    for (int it = 0; it < 300 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double fm = eval(p, mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out.push_back({0.5 * (lo + hi), 1});
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return a.x < b.x; });
  return out;
}

// Eigenvalues of a small symmetric matrix as characteristic-polynomial roots,
// repeated by multiplicity, ascending.
inline std::vector<double> eigenvalues_by_charpoly(const Eigen::MatrixXd& s) {
  std::vector<double> out;
  for (const auto& r : real_roots(characteristic_polynomial(s))) {
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.x);
  }
  return out;
}

// Central difference of f along coordinate k of x.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                 int k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double fp = f(x);
  x[k] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// Random circulation: a sum of directed cycles over random vertex subsets.
// Exactly balanced, but not necessarily connected.
inline Eigen::MatrixXd random_circulation(int n, int cycles, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int c = 0; c < cycles; ++c) {
    std::shuffle(order.begin(), order.end(), gen);
    const int len = std::uniform_int_distribution<int>(2, n)(gen);
    const double wt = weight(gen);
    for (int k = 0; k < len; ++k) w(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>((k + 1) % len)]) += wt;
  }
  return w;
}

// Reachability by Floyd-Warshall closure; independent of the graph module's
// BFS and Tarjan implementations.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reachability(const Eigen::MatrixXd& w, bool symmetrize) {
  const auto n = w.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> r(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      r(i, j) = i == j || w(i, j) > 0.0 || (symmetrize && w(j, i) > 0.0);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        r(i, j) = r(i, j) || (r(i, k) && r(k, j));
  return r;
}

inline bool all_reachable(const Eigen::MatrixXd& w, bool symmetrize) { return reachability(w, symmetrize).all(); }

}  // namespace oracle
