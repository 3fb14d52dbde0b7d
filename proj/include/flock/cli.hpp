#pragma once

// flockctl: gen | check | run | analyze | plot.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flock/analysis.hpp"
#include "flock/graphs.hpp"
#include "flock/scenario.hpp"
#include "flock/simulate.hpp"
#include "flock/svg_plot.hpp"
#include "flock/trajectory_io.hpp"

namespace flock::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Directory for generated files when --out is not given.
inline std::string default_output_dir() {
  if (const char* env = std::getenv("FLOCK_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

namespace detail {

namespace fs = std::filesystem;

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> law;
  std::optional<std::string> damping;

  void apply(ScenarioConfig& cfg) const {
    if (dt) cfg.sim.dt = *dt;
    if (t_end) cfg.sim.t_end = *t_end;
    if (law) cfg.control.law = parse_control_law(*law);
    if (damping) apply_damping_mode(cfg.control, *damping);
    cfg.sim.validate();
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--dt", dt, "Integrator step [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--t-end", t_end, "Simulated duration [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--law", law, "Control law")->check(CLI::IsMember({"eq6", "eq14", "eq15"}));
    cmd->add_option("--damping", damping, "Damping model")->check(CLI::IsMember({"none", "raw", "compensated"}));
  }
};

inline std::string vec_str(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(10) << '(';
  for (Eigen::Index k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  os << ')';
  return os.str();
}

inline std::string stem_of(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  // foo.trajectory.csv -> foo
  if (const auto dot = stem.rfind(".trajectory"); dot != std::string::npos) stem.erase(dot);
  return stem;
}

struct RunReport {
  std::string scenario;
  std::string text;
  bool ok = true;
};

inline RunReport run_one(const std::string& path, const Overrides& ov, const std::string& out_dir, bool strict,
                         bool plots) {
  RunReport rep{path, {}, true};
  std::ostringstream os;
  ScenarioConfig cfg = load_scenario(path);
  ov.apply(cfg);
  const Swarm sw = cfg.swarm();
  const auto violations = validate(sw);
  for (const auto& v : violations) os << "warning: " << v.assumption << ": " << v.detail << '\n';
  if (strict && !violations.empty()) {
    os << "refusing to run: assumptions violated (--strict)\n";
    rep.text = os.str();
    rep.ok = false;
    return rep;
  }
  const SwarmState s0 = cfg.initial_state();
  const Trajectory tr = run(sw, s0, cfg.sim);

  fs::create_directories(out_dir);
  const std::string stem = stem_of(path);
  const std::string traj_path = (fs::path(out_dir) / (stem + ".trajectory.csv")).string();
  const std::string metrics_path = (fs::path(out_dir) / (stem + ".metrics.csv")).string();
  io::export_trajectory(tr, traj_path);
  io::export_metrics(tr, metrics_path);

  os << "scenario: " << path << '\n';
  os << "law: " << to_string(cfg.control.law) << ", damping: " << damping_mode(cfg.control) << '\n';
  os << "status: " << to_string(tr.status);
  if (!tr.abort_reason.empty()) os << " (" << tr.abort_reason << ")";
  os << '\n';
  os << "samples: " << tr.samples.size() << '\n';
  if (!tr.samples.empty()) {
    const auto& last = tr.samples.back();
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& s : tr.samples) min_dist = std::min(min_dist, s.metrics.min_distance);
    os << "final time: " << last.time() << " s\n";
    os << "final dispersion: " << last.metrics.dispersion << " m/s\n";
    os << "min distance: " << min_dist << " m\n";
    const auto t_cons = detect_consensus(tr, cfg.sim.consensus_tol);
    os << "consensus time: " << (t_cons ? std::to_string(*t_cons) + " s" : std::string("none")) << '\n';
  }
  os << "trajectory: " << traj_path << '\n' << "metrics: " << metrics_path << '\n';
  if (plots && !tr.samples.empty()) {
    const std::string vel = (fs::path(out_dir) / (stem + ".velocities.svg")).string();
    plot::plot_velocities(tr, vel);
    os << "plot: " << vel << '\n';
    if (cfg.dimension == 2) {
      const std::string paths = (fs::path(out_dir) / (stem + ".paths.svg")).string();
      plot::plot_trajectories(tr, paths, sw.masses());
      os << "plot: " << paths << '\n';
    }
  }
  rep.ok = tr.status == TerminalStatus::Completed;
  rep.text = os.str();
  return rep;
}

}  // namespace detail

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Flocking of point-mass agents over a weight-balanced velocity digraph", "flockctl"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  int gen_agents = 10;
  int gen_dim = 2;
  std::uint64_t gen_seed = 1;
  std::string gen_output;
  bool gen_zero_com = false;
  detail::Overrides gen_ov;
  gen->add_option("--agents,-N", gen_agents, "Number of agents")->check(CLI::Range(2, 100000));
  gen->add_option("--dim,-n", gen_dim, "Spatial dimension")->check(CLI::Range(1, 1000));
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--output,-o", gen_output, "Output file (stdout when omitted)");
  gen->add_flag("--zero-com", gen_zero_com, "Shift velocities so the centre of mass starts at rest");
  gen_ov.attach(gen);

  // check
  auto* check = app.add_subcommand("check", "Validate the velocity graph and report its spectrum");
  std::string check_path;
  double check_tol = kDefaultBalanceTol;
  bool check_strict = false;
  check->add_option("scenario", check_path, "Scenario file")->required();
  check->add_option("--tol", check_tol, "Balance tolerance")->check(CLI::NonNegativeNumber);
  check->add_flag("--strict", check_strict, "Exit 1 when an assumption is violated");

  // run
  auto* runc = app.add_subcommand("run", "Simulate a scenario and export CSV");
  std::vector<std::string> run_paths;
  std::string run_out;
  bool run_strict = false;
  bool run_batch = false;
  bool run_plot = false;
  detail::Overrides run_ov;
  runc->add_option("scenario", run_paths, "Scenario file(s)")->required();
  runc->add_option("--out", run_out, "Output directory");
  runc->add_flag("--strict", run_strict, "Refuse to run when assumptions are violated");
  runc->add_flag("--batch", run_batch, "Run several scenarios in parallel");
  runc->add_flag("--plot", run_plot, "Also write SVG figures");
  run_ov.attach(runc);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Recompute metrics from an exported trajectory");
  std::string an_scenario, an_traj, an_metrics_out;
  std::optional<double> an_tol;
  detail::Overrides an_ov;
  analyze->add_option("scenario", an_scenario, "Scenario file")->required();
  analyze->add_option("trajectory", an_traj, "Trajectory CSV")->required();
  analyze->add_option("--tol", an_tol, "Consensus tolerance [m/s]")->check(CLI::PositiveNumber);
  analyze->add_option("--metrics-out", an_metrics_out, "Write recomputed metrics CSV here");
  an_ov.attach(analyze);

  // plot
  auto* plotc = app.add_subcommand("plot", "Render SVG figures from a trajectory CSV");
  std::string plot_traj, plot_scenario, plot_out;
  plotc->add_option("trajectory", plot_traj, "Trajectory CSV")->required();
  plotc->add_option("--scenario", plot_scenario, "Scenario file (supplies masses for the centre of mass)");
  plotc->add_option("--out", plot_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen) {
      ScenarioConfig cfg = generate_scenario(gen_agents, gen_dim, gen_seed);
      gen_ov.apply(cfg);
      if (gen_zero_com) remove_com_velocity(cfg);
      if (gen_output.empty()) {
        out << to_json(cfg).dump(2) << '\n';
      } else {
        save_scenario(cfg, gen_output);
        out << "wrote " << gen_output << '\n';
      }
      return kExitOk;
    }

    if (*check) {
      const ScenarioConfig cfg = load_scenario(check_path);
      const Swarm sw = cfg.swarm();
      const auto& g = sw.coupling_graph();
      const bool balanced = is_weight_balanced(g, check_tol);
      const bool weak = is_weakly_connected(g);
      const bool strong = is_strongly_connected(g);
      out << std::boolalpha;
      out << "agents: " << g.size() << '\n';
      out << "law: " << to_string(cfg.control.law) << '\n';
      out << "weight balanced: " << balanced << '\n';
      out << "weakly connected: " << weak << '\n';
      out << "strongly connected: " << strong << '\n';
      if (balanced) {
        out << "balanced => (weak <=> strong): " << verify_proposition1(g, check_tol) << '\n';
      } else {
        out << "balanced => (weak <=> strong): not applicable (graph unbalanced)\n";
      }
      if (g.size() >= 2) out << "lambda2(L + L^T): " << std::setprecision(12) << lambda2(g) << '\n';
      out << "equilibrium distance: " << potential::equilibrium_distance(cfg.potential) << " m\n";
      const auto violations = validate(sw, check_tol);
      for (const auto& v : violations) out << "violation: " << v.assumption << ": " << v.detail << '\n';
      if (violations.empty()) out << "assumptions: satisfied\n";
      return check_strict && !violations.empty() ? kExitDomain : kExitOk;
    }

    if (*runc) {
      if (run_paths.size() > 1 && !run_batch) {
        err << "usage error: several scenarios given; pass --batch\n";
        return kExitUsage;
      }
      const std::string out_dir = run_out.empty() ? default_output_dir() : run_out;
      std::vector<std::future<detail::RunReport>> jobs;
      for (const auto& p : run_paths) {
        jobs.push_back(std::async(std::launch::async, [&, p] {
          try {
            return detail::run_one(p, run_ov, out_dir, run_strict, run_plot);
          } catch (const std::exception& e) {
            return detail::RunReport{p, std::string("error: ") + e.what() + '\n', false};
          }
        }));
      }
      bool all_ok = true;
      for (auto& j : jobs) {
        const auto rep = j.get();
        out << rep.text;
        if (jobs.size() > 1) out << "---\n";
        all_ok = all_ok && rep.ok;
      }
      return all_ok ? kExitOk : kExitDomain;
    }

    if (*analyze) {
      ScenarioConfig cfg = load_scenario(an_scenario);
      an_ov.apply(cfg);
      const Swarm sw = cfg.swarm();
      const Trajectory tr = io::with_metrics(io::read_trajectory(an_traj), sw);
      if (tr.samples.empty()) throw std::invalid_argument("trajectory has no samples");
      const double tol = an_tol.value_or(cfg.sim.consensus_tol);

      const auto& first = tr.samples.front();
      const auto& last = tr.samples.back();
      double worst_increase = -std::numeric_limits<double>::infinity();
      double min_slack = std::numeric_limits<double>::infinity();
      double min_dist = std::numeric_limits<double>::infinity();
      double com_drift = 0.0, avg_drift = 0.0;
      for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const auto& m = tr.samples[k].metrics;
        if (k > 0) worst_increase = std::max(worst_increase, m.energy_J - tr.samples[k - 1].metrics.energy_J);
        min_slack = std::min(min_slack, m.rate_bound_slack);
        min_dist = std::min(min_dist, m.min_distance);
        com_drift = std::max(com_drift, (m.com_velocity - first.metrics.com_velocity).cwiseAbs().maxCoeff());
        avg_drift = std::max(avg_drift, (m.average_velocity - first.metrics.average_velocity).cwiseAbs().maxCoeff());
      }

      out << std::setprecision(10);
      out << "status: " << to_string(tr.status) << '\n';
      out << "samples: " << tr.samples.size() << '\n';
      const auto t_cons = detect_consensus(tr, tol);
      out << "consensus time (tol " << tol << " m/s): "
          << (t_cons ? std::to_string(*t_cons) + " s" : std::string("none")) << '\n';
      out << "final dispersion: " << last.metrics.dispersion << " m/s\n";
      out << "min distance: " << min_dist << " m\n";
      out << "max energy increase between samples: " << worst_increase << '\n';
      out << "com velocity drift: " << com_drift << " m/s\n";
      out << "average velocity drift: " << avg_drift << " m/s\n";
      out << "min rate-bound slack: " << min_slack << '\n';
      try {
        const Vector predicted = analysis::predicted_final_velocity(first.state, sw);
        double err_max = 0.0;
        for (int i = 0; i < last.state.count(); ++i) {
          err_max = std::max(err_max, (last.state.velocities.row(i) - predicted.transpose()).cwiseAbs().maxCoeff());
        }
        out << "predicted final velocity: " << detail::vec_str(predicted) << '\n';
        out << "max |v_final - v_predicted|: " << err_max << " m/s\n";
      } catch (const NoPredictionError& e) {
        out << "predicted final velocity: none (" << e.what() << ")\n";
      }
      if (!an_metrics_out.empty()) {
        io::export_metrics(tr, an_metrics_out);
        out << "metrics: " << an_metrics_out << '\n';
      }
      return kExitOk;
    }

    if (*plotc) {
      io::LoadedTrajectory loaded = io::read_trajectory(plot_traj);
      if (loaded.states.empty()) throw std::invalid_argument("trajectory has no samples");
      Trajectory tr;
      tr.status = loaded.status;
      for (auto& s : loaded.states) tr.samples.push_back({std::move(s), {}});
      Vector masses;
      if (!plot_scenario.empty()) masses = load_scenario(plot_scenario).swarm().masses();
      const std::string out_dir = plot_out.empty() ? default_output_dir() : plot_out;
      std::filesystem::create_directories(out_dir);
      const std::string stem = detail::stem_of(plot_traj);
      const std::string vel = (std::filesystem::path(out_dir) / (stem + ".velocities.svg")).string();
      plot::plot_velocities(tr, vel);
      out << "wrote " << vel << '\n';
      if (tr.samples.front().state.dimension() == 2) {
        const std::string paths = (std::filesystem::path(out_dir) / (stem + ".paths.svg")).string();
        plot::plot_trajectories(tr, paths, masses);
        out << "wrote " << paths << '\n';
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace flock::cli
