#include "cournot_cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cournot/basin.hpp"
#include "cournot/cournot_map.hpp"
#include "cournot/error.hpp"
#include "cournot/format.hpp"
#include "cournot/hjc.hpp"
#include "cournot/intercept.hpp"
#include "cournot/problem.hpp"
#include "cournot/regulate.hpp"
#include "cournot_cli/check.hpp"

namespace cournot::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string problem;
  std::string out_dir = ".";
  int dilation = 0;
  std::optional<int> dilation_override;
  std::string policy = "minimal-norm";
  double T = 0.0;
  std::vector<double> x;
  std::optional<double> omega;
  std::string scenario;
  std::string costs;
  std::optional<double> ymax;
  std::optional<double> ystep;
  bool liquidity = false;
  std::uint64_t seed = 1;
};

class Writer {
 public:
  Writer(const std::string& dir, std::ostream& log) : dir_(dir), log_(log) {}

  std::string write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << content;
    log_ << "wrote " << path.string() << '\n';
    return path.string();
  }

 private:
  fs::path dir_;
  std::ostream& log_;
};

StateVec state_arg(const GridSpec& grid, const std::vector<double>& x) {
  if (x.size() != grid.dim()) {
    throw ValidationError("--x needs " + std::to_string(grid.dim()) + " component(s)");
  }
  StateVec v{};
  std::copy(x.begin(), x.end(), v.begin());
  return v;
}

int cmd_basin(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = load_problem(cfg.problem);
  const CournotGraph g = capture_basin(p, step_rule(p, cfg.dilation));
  Writer w(cfg.out_dir, out);
  w.write("graph.csv", export_graph_csv(g));
  w.write("graph.json", export_graph_metadata(g));
  out << "cells " << g.cells.count() << '\n';
  if (g.status == BasinStatus::empty_basin) out << "warning: empty basin (no departure cell)\n";
  return kOk;
}

int cmd_aperture(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = load_problem(cfg.problem);
  const CournotGraph g = capture_basin(p, step_rule(p, cfg.dilation), {.labels = false});
  Writer(cfg.out_dir, out).write("aperture.csv", export_aperture_csv(aperture(g), cfg.liquidity));
  return kOk;
}

int cmd_arrival(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = load_problem(cfg.problem);
  const CournotGraph g = capture_basin(p, step_rule(p, cfg.dilation), {.labels = false});
  Writer(cfg.out_dir, out).write("arrival.csv", export_arrival_csv(p.grid, arrival_tube(g)));
  return kOk;
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = load_problem(cfg.problem);
  const StepRule r = step_rule(p, cfg.dilation);
  const Policy policy = parse_policy(cfg.policy);
  const StateVec x = state_arg(p.grid, cfg.x);
  const CournotGraph g = capture_basin(p, r);
  const Trajectory tr = synthesize(p, r, g, cfg.T, x, cfg.omega, policy);
  Writer(cfg.out_dir, out).write("trajectory.csv", export_trajectory_csv(tr));
  return kOk;
}

int cmd_intercept(const RunConfig& cfg, std::ostream& out) {
  const Scenario sc = load_scenario(cfg.scenario);
  const StepRule r = step_rule(sc.problem, cfg.dilation_override.value_or(sc.dilation_radius));
  const std::vector<InterceptionReport> reports = pursue(sc.problem, r, sc.script, sc.t0, parse_policy(cfg.policy));
  Writer w(cfg.out_dir, out);
  std::vector<std::string> paths;
  for (const InterceptionReport& rep : reports) {
    const std::string name = "pursuer_round" + std::to_string(rep.round) + ".csv";
    if (!rep.pursuer_traj.states.empty()) w.write(name, export_trajectory_csv(rep.pursuer_traj));
    paths.push_back(rep.pursuer_traj.states.empty() ? "" : name);
  }
  if (!reports.empty() && !reports.back().pursuer_path.states.empty()) {
    w.write("pursuer_path.csv", export_trajectory_csv(reports.back().pursuer_path));
  }
  w.write("report.json", report_json(reports, sc.problem.grid.dim(), paths));
  for (const InterceptionReport& rep : reports) {
    out << "round " << rep.round << ": " << status_name(rep.status) << " t_flat=" << format_real(rep.t_flat)
        << " t_feasible=" << format_real(rep.t_feasible) << '\n';
  }
  return kOk;
}

int cmd_value(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = load_problem(cfg.problem);
  const StepRule r = step_rule(p, cfg.dilation);
  const CostSpec costs = load_costs(cfg.costs);
  ValueField vf = cost_to_arrive(p, r, costs);

  const double ystep = cfg.ystep.value_or(p.grid.t_axis.step);
  if (!(ystep > 0.0)) throw ValidationError("--ystep must be positive");
  double ymax = ystep;
  if (cfg.ymax) {
    ymax = *cfg.ymax;
  } else {
    double top = 0.0;
    for (double v : vf.v) {
      if (std::isfinite(v)) top = std::max(top, v);
    }
    ymax = (std::ceil(top / ystep - 1e-9) + 1.0) * ystep;
  }
  const double count = std::round(ymax / ystep);
  const Axis y_axis = Axis::make(0.0, count * ystep, ystep);
  epigraph_solution(p, r, costs, y_axis, vf);
  const CoincidenceStats st = coincidence_report(vf);

  nlohmann::ordered_json summary;
  summary["compared"] = st.compared;
  summary["max_abs"] = st.max_abs;
  summary["mean_abs"] = st.mean_abs;
  nlohmann::ordered_json mism = nlohmann::ordered_json::array();
  for (const auto& [t, s] : st.mismatches) {
    const StateVec x = p.grid.state_point(s);
    mism.push_back({{"t", p.grid.t_axis.value(t)}, {"x", std::vector<double>(x.begin(), x.begin() + p.grid.dim())}});
  }
  summary["mismatches"] = mism;
  summary["y_axis"] = {{"lo", y_axis.lo}, {"hi", y_axis.hi}, {"step", y_axis.step}};
  summary["status"] = vf.status == ValueStatus::ok ? "ok" : "y-range-exceeded";
  summary["y_overflow_cells"] = vf.y_overflow.count();

  Writer w(cfg.out_dir, out);
  w.write("value.csv", export_value_csv(vf));
  w.write("coincidence.json", summary.dump(2) + "\n");
  out << "compared " << st.compared << " max|V-W| " << format_real(st.max_abs) << " mean|V-W| "
      << format_real(st.mean_abs) << " mismatches " << st.mismatches.size() << '\n';
  if (vf.status == ValueStatus::y_range_exceeded) {
    out << "warning: y axis too short on " << vf.y_overflow.count() << " cell(s); raise --ymax\n";
  }
  return kOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = cfg.problem.empty() ? unit_integrator_problem() : load_problem(cfg.problem);
  out << "seed " << cfg.seed << '\n';
  bool all = true;
  for (const CheckResult& res : run_checks(p, cfg.dilation, cfg.seed)) {
    out << (res.passed ? "PASS " : "FAIL ") << res.name << " (" << res.detail << ")\n";
    all = all && res.passed;
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid solver for Cournot maps of duration-structured inclusions", "cournot"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub, bool needs_problem) {
    auto* opt = sub->add_option("problem", cfg.problem, "Problem JSON file");
    if (needs_problem) opt->required();
    sub->add_option("--out,-o", cfg.out_dir, "Output directory (created if absent)");
    sub->add_option("--dilation", cfg.dilation, "Landing-cell dilation radius (0 or 1)");
  };

  auto* basin = app.add_subcommand("basin", "Graph of the Cournot map");
  common(basin, true);
  auto* ap = app.add_subcommand("aperture", "Minimal aperture per (t, x)");
  common(ap, true);
  ap->add_flag("--liquidity", cfg.liquidity, "Add the reciprocal aperture column");
  auto* arr = app.add_subcommand("arrival", "Arrival tube");
  common(arr, true);
  auto* traj = app.add_subcommand("trajectory", "Synthesize a viable evolution into (T, x)");
  common(traj, true);
  traj->add_option("--T", cfg.T, "Terminal time")->required();
  traj->add_option("--x", cfg.x, "Terminal state (comma separated)")->required()->delimiter(',');
  traj->add_option("--omega", cfg.omega, "Aperture (default: minimal)");
  traj->add_option("--policy", cfg.policy, "minimal-norm | first-sample");
  auto* icp = app.add_subcommand("intercept", "Pursuit with re-planning");
  icp->add_option("--scenario", cfg.scenario, "Scenario JSON file")->required();
  icp->add_option("--out,-o", cfg.out_dir, "Output directory (created if absent)");
  icp->add_option("--dilation", cfg.dilation_override, "Override the scenario's dilation radius");
  icp->add_option("--policy", cfg.policy, "minimal-norm | first-sample");
  auto* val = app.add_subcommand("value", "Valuation function V and viability solution W");
  common(val, true);
  val->add_option("--costs", cfg.costs, "Cost JSON file")->required();
  val->add_option("--ymax", cfg.ymax, "Upper end of the y axis");
  val->add_option("--ystep", cfg.ystep, "y lattice step (default: time step)");
  auto* chk = app.add_subcommand("check", "Invariant battery (default problem: unit integrator)");
  common(chk, false);
  chk->add_option("--seed", cfg.seed, "Seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*basin) return cmd_basin(cfg, out);
    if (*ap) return cmd_aperture(cfg, out);
    if (*arr) return cmd_arrival(cfg, out);
    if (*traj) return cmd_trajectory(cfg, out);
    if (*icp) return cmd_intercept(cfg, out);
    if (*val) return cmd_value(cfg, out);
    if (*chk) return cmd_check(cfg, out);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kInputError;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kInputError;
  } catch (const OutOfBounds& e) {
    err << "out of bounds: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kInputError;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace cournot::cli
