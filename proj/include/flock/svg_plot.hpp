#pragma once

// Standalone SVG figures: planar agent paths with final-velocity arrows and
// the centre-of-mass track, and per-axis velocity curves over time.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "flock/errors.hpp"
#include "flock/simulate.hpp"

namespace flock::plot {

namespace detail {

inline constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline const char* color(int i) { return kPalette[static_cast<std::size_t>(i) % kPalette.size()]; }

struct Frame {
  double x0, x1, y0, y1;  // data bounds
  double left, top, width, height;  // pixel box

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::string star(double cx, double cy, double r) {
  std::ostringstream os;
  for (int k = 0; k < 10; ++k) {
    const double rad = (k % 2 == 0) ? r : 0.4 * r;
    const double ang = -std::numbers::pi / 2 + k * std::numbers::pi / 5;
    os << (k ? " " : "") << num(cx + rad * std::cos(ang)) << ',' << num(cy + rad * std::sin(ang));
  }
  return os.str();
}

}  // namespace detail

// Paths of all agents in the plane. Masses (one per agent) place the
// centre-of-mass star at its initial position and trace its track; unit masses
// are assumed when `masses` is empty.
inline void plot_trajectories(const Trajectory& tr, const std::string& path, const Vector& masses = {}) {
  if (tr.samples.empty()) throw std::invalid_argument("cannot plot an empty trajectory");
  const int dim = tr.samples.front().state.dimension();
  if (dim != 2) throw std::invalid_argument("trajectory plot needs a planar (n = 2) run");
  const int n = tr.samples.front().state.count();
  const Vector m = masses.size() == n ? masses : Vector::Ones(n);

  auto com = [&](const SwarmState& s) -> Vector { return (m.transpose() * s.positions).transpose() / m.sum(); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& sample : tr.samples) {
    x0 = std::min(x0, sample.state.positions.col(0).minCoeff());
    x1 = std::max(x1, sample.state.positions.col(0).maxCoeff());
    y0 = std::min(y0, sample.state.positions.col(1).minCoeff());
    y1 = std::max(y1, sample.state.positions.col(1).maxCoeff());
  }
  // Equal aspect ratio.
  const double span = std::max(x1 - x0, y1 - y0);
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  x0 = cx - 0.5 * span;
  x1 = cx + 0.5 * span;
  y0 = cy - 0.5 * span;
  y1 = cy + 0.5 * span;
  detail::pad(x0, x1);
  detail::pad(y0, y1);
  const detail::Frame f{x0, x1, y0, y1, 60, 30, 700, 700};

  const SwarmState& last = tr.samples.back().state;
  const Vector com0 = com(tr.samples.front().state);
  const double com_drift = (com(last) - com0).norm();

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width="800" height="780" viewBox="0 0 800 780">)" << '\n';
  svg << R"(<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto">)"
      << R"(<path d="M0,0 L6,3 L0,6 z" fill="black"/></marker></defs>)" << '\n';
  svg << R"(<rect x="60" y="30" width="700" height="700" fill="none" stroke="#888"/>)" << '\n';
  svg << "<text x=\"410\" y=\"770\" text-anchor=\"middle\" font-size=\"14\">x_1 [m]  ("
      << detail::num(x0) << " .. " << detail::num(x1) << ")</text>\n";
  svg << "<text x=\"20\" y=\"380\" font-size=\"14\" transform=\"rotate(-90 20 380)\">x_2 [m]  ("
      << detail::num(y0) << " .. " << detail::num(y1) << ")</text>\n";

  for (int i = 0; i < n; ++i) {
    svg << "<polyline class=\"agent-path\" fill=\"none\" stroke-dasharray=\"3,3\" stroke=\"" << detail::color(i)
        << "\" points=\"";
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      const auto& s = tr.samples[k].state;
      svg << (k ? " " : "") << detail::num(f.px(s.positions(i, 0))) << ',' << detail::num(f.py(s.positions(i, 1)));
    }
    svg << "\"/>\n";
  }

  // Final positions with velocity arrows scaled so the fastest is 40 px.
  const double vmax = std::max(1e-12, last.velocities.rowwise().norm().maxCoeff());
  for (int i = 0; i < n; ++i) {
    const double px = f.px(last.positions(i, 0)), py = f.py(last.positions(i, 1));
    svg << "<circle class=\"agent-final\" cx=\"" << detail::num(px) << "\" cy=\"" << detail::num(py)
        << "\" r=\"4\" fill=\"" << detail::color(i) << "\"/>\n";
    const double ax = 40.0 * last.velocities(i, 0) / vmax, ay = -40.0 * last.velocities(i, 1) / vmax;
    if (std::hypot(ax, ay) > 1.0) {
      svg << "<line class=\"velocity-arrow\" x1=\"" << detail::num(px) << "\" y1=\"" << detail::num(py) << "\" x2=\""
          << detail::num(px + ax) << "\" y2=\"" << detail::num(py + ay)
          << "\" stroke=\"black\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
    }
  }

  if (com_drift > 1e-9 * std::max(1.0, span)) {
    svg << "<polyline class=\"com-path\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      const Vector c = com(tr.samples[k].state);
      svg << (k ? " " : "") << detail::num(f.px(c[0])) << ',' << detail::num(f.py(c[1]));
    }
    svg << "\"/>\n";
  }
  svg << "<polygon id=\"com-star\" data-com-drift=\"" << detail::num(com_drift) << "\" points=\""
      << detail::star(f.px(com0[0]), f.py(com0[1]), 9) << "\" fill=\"gold\" stroke=\"black\"/>\n";
  svg << "</svg>\n";
  detail::write_file(path, svg.str());
}

// One panel per axis: every agent's velocity component against time, with a
// dashed line at the mean final value.
inline void plot_velocities(const Trajectory& tr, const std::string& path) {
  if (tr.samples.empty()) throw std::invalid_argument("cannot plot an empty trajectory");
  const int dim = tr.samples.front().state.dimension();
  const int n = tr.samples.front().state.count();
  const double t0 = tr.samples.front().time();
  double t1 = tr.samples.back().time();
  if (!(t1 > t0)) t1 = t0 + 1.0;

  constexpr double kPanelHeight = 260, kGap = 50, kTop = 30;
  const double height = kTop + dim * (kPanelHeight + kGap);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"" << detail::num(height)
      << "\" viewBox=\"0 0 900 " << detail::num(height) << "\">\n";

  for (int k = 0; k < dim; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : tr.samples) {
      lo = std::min(lo, s.state.velocities.col(k).minCoeff());
      hi = std::max(hi, s.state.velocities.col(k).maxCoeff());
    }
    detail::pad(lo, hi);
    const double top = kTop + k * (kPanelHeight + kGap);
    const detail::Frame f{t0, t1, lo, hi, 80, top, 780, kPanelHeight};
    svg << "<g class=\"velocity-panel\" data-axis=\"" << (k + 1) << "\">\n";
    svg << "<rect x=\"80\" y=\"" << detail::num(top) << "\" width=\"780\" height=\"" << kPanelHeight
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"20\" y=\"" << detail::num(top + kPanelHeight / 2) << "\" font-size=\"14\">v_" << (k + 1)
        << "</text>\n";
    svg << "<text x=\"80\" y=\"" << detail::num(top - 6) << "\" font-size=\"11\">[" << detail::num(lo) << ", "
        << detail::num(hi) << "] m/s over t = " << detail::num(t0) << " .. " << detail::num(t1) << " s</text>\n";
    for (int i = 0; i < n; ++i) {
      svg << "<polyline class=\"velocity-curve\" fill=\"none\" stroke=\"" << detail::color(i) << "\" points=\"";
      for (std::size_t s = 0; s < tr.samples.size(); ++s) {
        const auto& st = tr.samples[s].state;
        svg << (s ? " " : "") << detail::num(f.px(st.time)) << ',' << detail::num(f.py(st.velocities(i, k)));
      }
      svg << "\"/>\n";
    }
    const double final_mean = tr.samples.back().state.velocities.col(k).mean();
    svg << "<line class=\"final-mean\" x1=\"80\" x2=\"860\" y1=\"" << detail::num(f.py(final_mean)) << "\" y2=\""
        << detail::num(f.py(final_mean)) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  detail::write_file(path, svg.str());
}

}  // namespace flock::plot
