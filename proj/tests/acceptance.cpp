// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any selected criterion fails. Usage: cournot_acceptance [criterion]
// where criterion is 1..7, 2.aligned or 2.misaligned.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cournot/cournot_map.hpp"
#include "cournot/hjc.hpp"
#include "cournot/intercept.hpp"
#include "cournot/regulate.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace cournot;

namespace {

// Pinned limits.
constexpr double kOracleSeconds = 5.0;
constexpr double kApertureSeconds = 1.0;
constexpr double kValueSeconds = 10.0;
constexpr double kMisalignedTolerance = 0.25;  // one time step
constexpr double kCoincidenceTolerance = 0.25;  // one y step
constexpr unsigned kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    note(why);
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

/// Exports of a run, compared across worker counts by criterion 7.
std::string* sink = nullptr;
void record(const std::string& s) {
  if (sink) *sink += s;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

Tube random_box(const GridSpec& g, std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, g.x_axes[0].count - 1);
  std::size_t i = pick(rng), j = pick(rng);
  if (i > j) std::swap(i, j);
  return Tube::box({g.x_axes[0].value(i)}, {g.x_axes[0].value(j)});
}

std::pair<double, double> random_window(const GridSpec& g, std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, g.t_axis.count - 1);
  std::size_t i = pick(rng), j = pick(rng);
  if (i > j) std::swap(i, j);
  return {g.t_axis.value(i), g.t_axis.value(j)};
}

/// P1 with a random departure box and a random time-window environment
/// enclosing it.
std::vector<ProblemSpec> oracle_battery() {
  std::vector<ProblemSpec> out{unit_integrator_problem()};
  std::mt19937 rng(kSeed);
  const GridSpec g = out.front().grid;
  while (out.size() < 6) {
    ProblemSpec p = unit_integrator_problem();
    const Tube c = random_box(g, rng);
    const auto [t_lo, t_hi] = random_window(g, rng);
    std::uniform_int_distribution<int> widen(0, 4);
    const double lo = std::max(-2.0, c.lo[0] - 0.25 * widen(rng));
    const double hi = std::min(2.0, c.hi[0] + 0.25 * widen(rng));
    p.env = Tube::time_window(t_lo, t_hi, Tube::box({lo}, {hi}));
    p.departure = Tube::time_window(t_lo, t_hi, c);
    validate_problem(p);
    out.push_back(std::move(p));
  }
  return out;
}

ProblemSpec misaligned_problem() {
  ProblemSpec p = unit_integrator_problem();
  p.grid = GridSpec::make(p.grid.t_axis, p.grid.d_axis, {Axis::make(-2, 2, 0.2)});
  validate_problem(p);
  return p;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const Stopwatch sw;
  std::size_t cells = 0;
  const auto battery = oracle_battery();
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const ProblemSpec& p = battery[i];
    const CournotGraph g = capture_basin(p, step_rule(p));
    record(export_graph_csv(g));
    cells += g.cells.count();
    if (!(g.cells == support::to_cells(p.grid, oracle::bfs(p, 0)))) o.fail("problem " + std::to_string(i) + " differs");
  }
  const double s = sw.seconds();
  if (s >= kOracleSeconds) o.fail("runtime " + fmt(s) + " s >= " + fmt(kOracleSeconds) + " s");
  o.note(std::to_string(battery.size()) + " problems, " + std::to_string(cells) + " cells bit-exact, " + fmt(s) + " s");
  return o;
}

/// Largest |aperture - |x|| over lattice cells with |x| <= min(T, 2);
/// +inf when such a cell is unreachable.
struct ApertureError {
  double max_error = 0.0;
  std::size_t cells = 0;
  std::size_t violations = 0;
  double worst_t = 0.0, worst_x = 0.0;
};

ApertureError aperture_error(const ProblemSpec& p, int dilation, double tol) {
  const CournotGraph g = capture_basin(p, step_rule(p, dilation), {.labels = false});
  const ApertureField a = aperture(g);
  record(export_aperture_csv(a));
  ApertureError e;
  const GridSpec& grid = p.grid;
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    const double T = grid.t_axis.value(t);
    for (std::size_t s = 0; s < grid.state_count(); ++s) {
      const double x = grid.state_point(s)[0];
      if (std::abs(x) > std::min(T, 2.0) + 1e-9) continue;
      ++e.cells;
      const double err = std::abs(a.value(t, s) - std::abs(x));
      if (err > tol) ++e.violations;
      if (err > e.max_error) {
        e.max_error = err;
        e.worst_t = T;
        e.worst_x = x;
      }
    }
  }
  return e;
}

Outcome criterion2_aligned() {
  Outcome o;
  const Stopwatch sw;
  const ApertureError e = aperture_error(unit_integrator_problem(), 0, 1e-12);
  const double s = sw.seconds();
  if (e.violations > 0) o.fail(std::to_string(e.violations) + " cells not exact");
  if (s >= kApertureSeconds) o.fail("runtime " + fmt(s) + " s");
  o.note("aligned h_x = 0.25: " + std::to_string(e.cells) + " cells, max error " + fmt(e.max_error) + ", " +
         fmt(s) + " s");
  return o;
}

Outcome criterion2_misaligned() {
  Outcome o;
  const Stopwatch sw;
  const ApertureError e = aperture_error(misaligned_problem(), 1, kMisalignedTolerance);
  const double s = sw.seconds();
  if (e.violations > 0) {
    o.fail(std::to_string(e.violations) + " of " + std::to_string(e.cells) + " cells off by more than " +
           fmt(kMisalignedTolerance));
  }
  if (s >= kApertureSeconds) o.fail("runtime " + fmt(s) + " s");
  o.note("misaligned h_x = 0.2, dilation 1: max error " + fmt(e.max_error) + " at T=" + fmt(e.worst_t) +
         " x=" + fmt(e.worst_x) + ", " + fmt(s) + " s");
  return o;
}

Outcome criterion2() {
  Outcome a = criterion2_aligned();
  const Outcome b = criterion2_misaligned();
  a.pass = a.pass && b.pass;
  a.note(b.detail);
  return a;
}

Outcome criterion3() {
  Outcome o;
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  std::mt19937 rng(kSeed + 3);
  int bad = 0;
  for (int i = 0; i < 10; ++i) {
    auto draw = [&] {
      const auto [lo, hi] = random_window(p.grid, rng);
      return Tube::time_window(lo, hi, random_box(p.grid, rng));
    };
    const Tube c1 = draw(), c2 = draw();
    const CellSet a = capture_basin(with_departure(p, c1), r).cells;
    const CellSet b = capture_basin(with_departure(p, c2), r).cells;
    const CournotGraph ab = capture_basin(with_departure(p, Tube::union_of({c1, c2})), r);
    record(export_graph_csv(ab));
    if (!(ab.cells == (a | b))) ++bad;
  }
  if (bad > 0) o.fail(std::to_string(bad) + " pairs differ");
  o.note("10 random pairs, " + std::to_string(10 - bad) + " bit-exact");
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::size_t basins = 0, failures = 0;
  auto check = [&](const ProblemSpec& p, int dil) {
    const StepRule r = step_rule(p, dil);
    const CournotGraph g = capture_basin(p, r);
    ++basins;
    if (!fixed_point_check(p, r, g)) ++failures;
    return g;
  };
  for (const ProblemSpec& p : oracle_battery()) {
    check(p, 0);
    check(p, 1);
  }
  check(misaligned_problem(), 1);

  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  const CournotGraph g = check(p, 0);
  if (failures > 0) o.fail(std::to_string(failures) + " of " + std::to_string(basins) + " basins not fixed points");

  std::mt19937 rng(kSeed + 4);
  const auto set = g.cells.indices();
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  std::size_t bad = 0;
  for (int i = 0; i < 20; ++i) {
    const Cell c = p.grid.cell(set[pick(rng)]);
    const double T = p.grid.t_axis.value(c.t);
    const StateVec x = p.grid.state_point(c.x);
    const Trajectory tr = synthesize(p, r, g, T, x, p.grid.d_axis.value(c.d));
    record(export_trajectory_csv(tr));
    const bool near = std::abs(tr.states.back()[0] - x[0]) <= p.grid.x_axes[0].step + 1e-12;
    if (!membership_persistent(g, tr) || !near) ++bad;
  }
  if (bad > 0) o.fail(std::to_string(bad) + " of 20 trajectories invalid");
  o.note(std::to_string(basins) + " fixed points, 20 trajectories on the graph");
  return o;
}

Outcome criterion5() {
  Outcome o;
  {
    const Scenario sc = load_scenario(support::fixture("pursuit.json"));
    const auto reports = pursue(sc.problem, step_rule(sc.problem), sc.script, sc.t0);
    record(report_json(reports, 1));
    const InterceptionReport& r = reports.front();
    if (r.t_flat != 1.0) o.fail("t_flat " + fmt(r.t_flat));
    if (r.t_feasible != 2.25) o.fail("t_feasible " + fmt(r.t_feasible));
    if (r.x_capture[0] != 1.25) o.fail("x_capture " + fmt(r.x_capture[0]));
    if (r.start_state[0] != 0.0) o.fail("start " + fmt(r.start_state[0]));
    o.note("t_flat=" + fmt(r.t_flat) + " t_feasible=" + fmt(r.t_feasible) + " x=" + fmt(r.x_capture[0]) +
           " start=" + fmt(r.start_state[0]));
  }
  const Scenario sc = load_scenario(support::fixture("pursuit_two_round.json"));
  const StepRule r = step_rule(sc.problem);
  const auto reports = pursue(sc.problem, r, sc.script, sc.t0);
  record(report_json(reports, 1));
  if (reports.size() != 2 || !reports[1].captured()) {
    o.fail("second round did not capture");
    return o;
  }
  const InterceptionReport& r0 = reports[0];
  const InterceptionReport& r1 = reports[1];
  const double t1 = sc.script.entries[1].reveal_time;
  std::vector<Tube> points;
  for (std::size_t i = 0; i < r0.pursuer_traj.states.size(); ++i) {
    const double t = r0.pursuer_traj.time(i);
    if (t >= t1 - 1e-9) points.push_back(Tube::time_window(t, t, Tube::ball({r0.pursuer_traj.states[i][0]}, 0)));
  }
  const oracle::Capture want = oracle::first_capture(with_departure(sc.problem, Tube::union_of(points)),
                                                     sc.script.entries[1].track, t1, r0.t_feasible);
  if (r1.t_feasible != want.t) o.fail("round-1 capture " + fmt(r1.t_feasible) + " vs oracle " + fmt(want.t));
  for (const InterceptionReport& rep : reports) {
    const StateVec ev = *sc.script.entries[rep.round].track.sample(rep.t_feasible);
    if (std::abs(rep.pursuer_path.states.back()[0] - ev[0]) > sc.problem.grid.x_axes[0].step + 1e-12) {
      o.fail("round " + std::to_string(rep.round) + " misses the evader");
    }
  }
  o.note("re-planned capture t=" + fmt(r1.t_feasible) + " (oracle " + fmt(want.t) + ")");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const Stopwatch sw;
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  const Axis y = Axis::make(0, 4, 0.25);
  const ApertureField a = aperture(capture_basin(p, r));
  for (const char* name : {"costs_unit.json", "costs_norm.json"}) {
    const ValueField vf = epigraph_solution(p, r, load_costs(support::fixture(name)), y);
    record(export_value_csv(vf));
    const CoincidenceStats st = coincidence_report(vf);
    if (vf.status != ValueStatus::ok) o.fail(std::string(name) + ": y range exceeded");
    if (!st.mismatches.empty()) o.fail(std::string(name) + ": " + std::to_string(st.mismatches.size()) + " domain mismatches");
    if (st.max_abs > kCoincidenceTolerance) o.fail(std::string(name) + ": max|V-W| " + fmt(st.max_abs));
    o.note(std::string(name) + " max|V-W|=" + fmt(st.max_abs) + " over " + std::to_string(st.compared));
    if (std::string(name) == "costs_unit.json") {
      std::size_t off = 0;
      for (std::size_t i = 0; i < vf.v.size(); ++i) {
        if (vf.v[i] != a.value(i / p.grid.state_count(), i % p.grid.state_count())) ++off;
      }
      if (off > 0) o.fail(std::to_string(off) + " cells with V != aperture");
    }
  }
  const double s = sw.seconds();
  if (s >= kValueSeconds) o.fail("runtime " + fmt(s) + " s");
  o.note(fmt(s) + " s");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3},
      {"4", criterion4}, {"5", criterion5}, {"6", criterion6},
  };
  return list;
}

std::string run_exports(const char* threads) {
  setenv("COURNOT_THREADS", threads, 1);
  std::string out;
  sink = &out;
  for (const auto& [name, fn] : criteria()) {
    out += "== " + name + "\n";
    fn();
  }
  sink = nullptr;
  return out;
}

Outcome criterion7() {
  Outcome o;
  const char* prior = std::getenv("COURNOT_THREADS");
  const std::string saved = prior ? prior : "";
  const std::string one = run_exports("1");
  const std::string four = run_exports("4");
  if (prior) {
    setenv("COURNOT_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("COURNOT_THREADS");
  }
  if (one != four) o.fail("exports differ between 1 and 4 workers");
  o.note(std::to_string(one.size()) + " export bytes identical for 1 and 4 workers");
  return o;
}

const char* title(const std::string& id) {
  if (id == "1") return "oracle equivalence";
  if (id == "2" || id.rfind("2.", 0) == 0) return "aperture benchmark";
  if (id == "3") return "dilation property";
  if (id == "4") return "fixed point and membership persistence";
  if (id == "5") return "interception fixture";
  if (id == "6") return "V = W coincidence";
  return "determinism";
}

bool report(const std::string& id, const Outcome& o) {
  std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title(id) << " (" << o.detail << ")"
            << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  bool ok = true;
  if (only == "2.aligned") return report(only, criterion2_aligned()) ? 0 : 1;
  if (only == "2.misaligned") return report(only, criterion2_misaligned()) ? 0 : 1;
  bool matched = false;
  for (const auto& [name, fn] : criteria()) {
    if (!only.empty() && only != name) continue;
    matched = true;
    ok = report(name, fn()) && ok;
  }
  if (only.empty() || only == "7") {
    matched = true;
    ok = report("7", criterion7()) && ok;
  }
  if (!matched) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return ok ? 0 : 1;
}
