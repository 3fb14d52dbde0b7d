#include <gtest/gtest.h>

#include <regex>

#include "support.hpp"

using flock::TerminalStatus;
using support::rows;

namespace {

flock::Trajectory short_run(std::uint64_t seed, int agents = 6, int dim = 2, double t_end = 5.0) {
  const auto cfg = flock::generate_scenario(agents, dim, seed);
  auto sim = cfg.sim;
  sim.t_end = t_end;
  return flock::run(cfg.swarm(), cfg.initial_state(), sim);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Headers, ExactSpelling) {
  EXPECT_EQ(flock::io::trajectory_header(2), "t,agent,x_1,x_2,v_1,v_2");
  EXPECT_EQ(flock::io::trajectory_header(3), "t,agent,x_1,x_2,x_3,v_1,v_2,v_3");
  EXPECT_EQ(flock::io::metrics_header(2),
            "t,J,Jdot,Jstar,dispersion,min_dist,com_v_1,com_v_2,avg_v_1,avg_v_2,bound_slack");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(flock::io::format_double(0.1), "0.1");
  EXPECT_EQ(flock::io::format_double(-2.0), "-2");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(flock::io::format_double(x)), x);
}

TEST(ExportTrajectory, LayoutAndRowCount) {
  support::TempDir dir;
  const auto tr = short_run(1);
  flock::io::export_trajectory(tr, dir.file("t.csv"));
  const auto lines = lines_of(support::slurp(dir.file("t.csv")));
  ASSERT_EQ(lines.size(), 1 + tr.samples.size() * 6 + 1);
  EXPECT_EQ(lines.front(), "t,agent,x_1,x_2,v_1,v_2");
  EXPECT_EQ(lines.back(), "# terminal_status: completed");
  EXPECT_EQ(lines[1].substr(0, 4), "0,0,");
  EXPECT_EQ(lines[6].substr(0, 4), "0,5,");
  EXPECT_EQ(lines[7].substr(0, 6), "0.1,0,");
}

TEST(ExportTrajectory, ReparseReproducesStates) {
  support::TempDir dir;
  for (int dim : {1, 2, 3}) {
    const auto tr = short_run(2, 5, dim);
    flock::io::export_trajectory(tr, dir.file("t.csv"));
    const auto loaded = flock::io::read_trajectory(dir.file("t.csv"));
    EXPECT_EQ(loaded.status, TerminalStatus::Completed);
    ASSERT_EQ(loaded.states.size(), tr.samples.size());
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      const auto& a = tr.samples[k].state;
      const auto& b = loaded.states[k];
      EXPECT_EQ(a.time, b.time);
      EXPECT_LE((a.positions - b.positions).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((a.velocities - b.velocities).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ExportTrajectory, AbortStatusInFooter) {
  support::TempDir dir;
  const auto sw = support::swarm({1, 1}, flock::WeightedDigraph::cycle(2));
  flock::SimConfig cfg;
  const auto tr = flock::run(sw, support::state(rows({{0, 0}, {1e-4, 0}}), flock::Matrix::Zero(2, 2)), cfg);
  ASSERT_EQ(tr.status, TerminalStatus::CollisionAbort);
  flock::io::export_trajectory(tr, dir.file("a.csv"));
  const auto lines = lines_of(support::slurp(dir.file("a.csv")));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1], "# terminal_status: collision_abort");
  EXPECT_EQ(flock::io::read_trajectory(dir.file("a.csv")).status, TerminalStatus::CollisionAbort);
}

TEST(ExportTrajectory, UnwritablePathIsAnIoError) {
  support::TempDir dir;
  EXPECT_THROW(flock::io::export_trajectory(short_run(1, 3, 2, 0.5), dir.file("missing/t.csv")), flock::IoError);
  EXPECT_THROW(flock::io::read_trajectory(dir.file("missing.csv")), flock::IoError);
}

TEST(ReadTrajectory, RejectsMalformedFiles) {
  support::TempDir dir;
  support::spit(dir.file("h.csv"), "time,agent,x,v\n");
  EXPECT_THROW(flock::io::read_trajectory(dir.file("h.csv")), std::runtime_error);
  support::spit(dir.file("n.csv"), "t,agent,x_1,v_1\n0,0,abc,1\n");
  EXPECT_THROW(flock::io::read_trajectory(dir.file("n.csv")), std::runtime_error);
  support::spit(dir.file("c.csv"), "t,agent,x_1,v_1\n0,0,1\n");
  EXPECT_THROW(flock::io::read_trajectory(dir.file("c.csv")), std::runtime_error);
}

TEST(ExportMetrics, LayoutMatchesRecords) {
  support::TempDir dir;
  const auto tr = short_run(3);
  flock::io::export_metrics(tr, dir.file("m.csv"));
  const auto lines = lines_of(support::slurp(dir.file("m.csv")));
  ASSERT_EQ(lines.size(), tr.samples.size() + 2);
  EXPECT_EQ(lines.front(), flock::io::metrics_header(2));
  EXPECT_EQ(lines.back(), "# terminal_status: completed");
  std::vector<double> fields;
  std::istringstream row(lines[1]);
  for (std::string f; std::getline(row, f, ',');) fields.push_back(std::stod(f));
  ASSERT_EQ(fields.size(), 11u);
  const auto& m = tr.samples.front().metrics;
  EXPECT_EQ(fields[1], m.energy_J);
  EXPECT_EQ(fields[2], m.energy_rate_analytic);
  EXPECT_EQ(fields[3], m.error_energy_Jstar);
  EXPECT_EQ(fields[4], m.dispersion);
  EXPECT_EQ(fields[5], m.min_distance);
  EXPECT_EQ(fields[6], m.com_velocity[0]);
  EXPECT_EQ(fields[9], m.average_velocity[1]);
  EXPECT_EQ(fields[10], m.rate_bound_slack);
}

TEST(WithMetrics, RecomputesTheSameRecords) {
  support::TempDir dir;
  const auto cfg = flock::generate_scenario(5, 2, 8);
  auto sim = cfg.sim;
  sim.t_end = 3;
  const auto tr = flock::run(cfg.swarm(), cfg.initial_state(), sim);
  flock::io::export_trajectory(tr, dir.file("t.csv"));
  const auto back = flock::io::with_metrics(flock::io::read_trajectory(dir.file("t.csv")), cfg.swarm());
  ASSERT_EQ(back.samples.size(), tr.samples.size());
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    EXPECT_NEAR(back.samples[k].metrics.energy_J, tr.samples[k].metrics.energy_J, 1e-12);
  }
  EXPECT_THROW(flock::io::with_metrics(flock::io::read_trajectory(dir.file("t.csv")),
                                       flock::generate_scenario(4, 2, 8).swarm()),
               std::invalid_argument);
}

TEST(PlotVelocities, ConsensusCurvesEndWithinTheBand) {
  support::TempDir dir;
  const auto cfg = flock::generate_scenario(10, 2, 1);
  const auto tr = flock::run(cfg.swarm(), cfg.initial_state(), cfg.sim);
  ASSERT_TRUE(flock::is_converged(tr, cfg.sim.consensus_tol));
  flock::plot::plot_velocities(tr, dir.file("v.svg"));
  const auto svg = support::slurp(dir.file("v.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "class=\"velocity-panel\""), 2);
  EXPECT_EQ(count(svg, "class=\"velocity-curve\""), 20);
  // Terminal values of the plotted data sit in a band of width 2 * consensus_tol.
  const auto& last = tr.samples.back().state.velocities;
  for (int k = 0; k < 2; ++k) {
    EXPECT_LE(last.col(k).maxCoeff() - last.col(k).minCoeff(), 2 * cfg.sim.consensus_tol);
  }
}

TEST(PlotTrajectories, StationaryCentreOfMassStar) {
  support::TempDir dir;
  auto cfg = flock::generate_scenario(8, 2, 4);
  flock::remove_com_velocity(cfg);
  auto sim = cfg.sim;
  sim.t_end = 30;
  const auto sw = cfg.swarm();
  const auto tr = flock::run(sw, cfg.initial_state(), sim);
  flock::plot::plot_trajectories(tr, dir.file("p.svg"), sw.masses());
  const auto svg = support::slurp(dir.file("p.svg"));
  EXPECT_EQ(count(svg, "class=\"agent-path\""), 8);
  EXPECT_EQ(count(svg, "id=\"com-star\""), 1);
  EXPECT_EQ(count(svg, "class=\"com-path\""), 0);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("data-com-drift=\"([^\"]+)\"")));
  EXPECT_LT(std::stod(m[1]), 1e-9);
}

TEST(PlotTrajectories, MovingCentreOfMassIsTraced) {
  support::TempDir dir;
  const auto cfg = flock::generate_scenario(6, 2, 5);
  const auto sw = cfg.swarm();
  const auto tr = short_run(5, 6, 2, 10.0);
  flock::plot::plot_trajectories(tr, dir.file("p.svg"), sw.masses());
  const auto svg = support::slurp(dir.file("p.svg"));
  EXPECT_EQ(count(svg, "class=\"com-path\""), 1);
}

TEST(Plots, EmptyTrajectoryWritesNothing) {
  support::TempDir dir;
  flock::Trajectory empty;
  EXPECT_THROW(flock::plot::plot_trajectories(empty, dir.file("p.svg")), std::invalid_argument);
  EXPECT_THROW(flock::plot::plot_velocities(empty, dir.file("v.svg")), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(dir.file("p.svg")));
  EXPECT_FALSE(std::filesystem::exists(dir.file("v.svg")));
}

TEST(Plots, TrajectoryPlotNeedsThePlane) {
  support::TempDir dir;
  EXPECT_THROW(flock::plot::plot_trajectories(short_run(6, 4, 3, 1.0), dir.file("p.svg")), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(dir.file("p.svg")));
  EXPECT_NO_THROW(flock::plot::plot_velocities(short_run(6, 4, 3, 1.0), dir.file("v.svg")));
}
