#include "cournot_cli/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <random>
#include <sstream>

#include "cournot/basin.hpp"
#include "cournot/cournot_map.hpp"
#include "cournot/regulate.hpp"

namespace cournot::cli {

CellSet bfs_basin(const ProblemSpec& p, const StepRule& r) {
  const GridSpec& grid = p.grid;
  CellSet seen = CellSet::over_cells(grid);
  std::deque<Cell> queue;
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < grid.state_count(); ++s) {
      const Cell c{t, 0, grid.state_index(s)};
      if (in_departure(p, t, c.x) && in_env(p, c)) {
        seen.set(grid.flat(c));
        queue.push_back(c);
      }
    }
  }
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (const Cell& n : successors(p, r, c)) {
      const std::size_t f = grid.flat(n);
      if (seen.test(f) || !in_env(p, n)) continue;
      seen.set(f);
      queue.push_back(n);
    }
  }
  return seen;
}

ProblemSpec shrink(const ProblemSpec& p, std::size_t max_td, std::size_t max_x) {
  auto cut = [](const Axis& a, std::size_t first, std::size_t n) {
    return Axis::make(a.value(first), a.value(first + n - 1), a.step);
  };
  ProblemSpec q = p;
  const std::size_t ntd = std::min(p.grid.t_axis.count, max_td);
  std::vector<Axis> xs;
  for (const Axis& a : p.grid.x_axes) {
    const std::size_t n = std::min(a.count, max_x);
    xs.push_back(cut(a, (a.count - n) / 2, n));
  }
  q.grid = GridSpec::make(cut(p.grid.t_axis, 0, ntd), cut(p.grid.d_axis, 0, std::min(p.grid.d_axis.count, ntd)),
                          std::move(xs));
  std::vector<TabulatedVelocities> kept;
  for (const TabulatedVelocities& tv : p.dynamics.table) {
    const Point pt = point_of(p.grid, tv.cell);
    auto t = q.grid.t_axis.try_index(pt.t);
    auto d = q.grid.d_axis.try_index(pt.d);
    auto x = q.grid.try_state_index(pt.x);
    if (t && d && x) kept.push_back({Cell{*t, *d, *x}, tv.velocities});
  }
  q.dynamics.table = std::move(kept);
  return q;
}

namespace {

std::string describe(std::size_t a, std::size_t b, const char* what) {
  std::ostringstream ss;
  ss << a << " vs " << b << ' ' << what;
  return ss.str();
}

/// Random departure tube: a box in state space, optionally restricted to a
/// random time window.
Tube random_departure(const GridSpec& grid, std::mt19937_64& rng) {
  std::vector<double> lo, hi;
  for (const Axis& a : grid.x_axes) {
    std::uniform_int_distribution<std::size_t> pick(0, a.count - 1);
    std::size_t i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    lo.push_back(a.value(i));
    hi.push_back(a.value(j));
  }
  Tube box = Tube::box(lo, hi);
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::uniform_int_distribution<std::size_t> pick(0, grid.t_axis.count - 1);
    std::size_t i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    return Tube::time_window(grid.t_axis.value(i), grid.t_axis.value(j), box);
  }
  return box;
}

CheckResult check_oracle(const ProblemSpec& p, const StepRule& r) {
  const ProblemSpec q = shrink(p, 17, 50);
  const StepRule rq = step_rule(q, r.dilation_radius);
  const CellSet fast = capture_basin(q, rq, {.labels = false}).cells;
  const CellSet slow = bfs_basin(q, rq);
  return {"oracle-equivalence", fast == slow, describe(fast.count(), slow.count(), "cells")};
}

CheckResult check_adjoint(const ProblemSpec& p, const StepRule& r) {
  const ProblemSpec q = shrink(p, 5, 5);
  const StepRule rq = step_rule(q, r.dilation_radius);
  const GridSpec& grid = q.grid;
  std::size_t pairs = 0, failures = 0;
  for (std::size_t f = 0; f < grid.cell_count(); ++f) {
    const Cell c = grid.cell(f);
    const auto succ = successors(q, rq, c);
    for (const Cell& n : succ) {
      const auto pred = predecessors(q, rq, n);
      ++pairs;
      if (std::find(pred.begin(), pred.end(), c) == pred.end()) ++failures;
    }
    for (const Cell& b : predecessors(q, rq, c)) {
      const auto back = successors(q, rq, b);
      ++pairs;
      if (std::find(back.begin(), back.end(), c) == back.end()) ++failures;
    }
  }
  return {"adjointness", failures == 0, describe(failures, pairs, "failing pairs")};
}

struct Battery {
  std::vector<CheckResult> results;
  std::size_t basins = 0;
  std::size_t fixed_point_failures = 0;

  CournotGraph basin(const ProblemSpec& p, const StepRule& r) {
    CournotGraph g = capture_basin(p, r);
    ++basins;
    if (!fixed_point_check(p, r, g)) ++fixed_point_failures;
    return g;
  }
};

CheckResult check_dilation(Battery& bat, const ProblemSpec& p, const StepRule& r, std::mt19937_64& rng) {
  constexpr int kPairs = 10;
  int failures = 0;
  for (int i = 0; i < kPairs; ++i) {
    const Tube c1 = random_departure(p.grid, rng);
    const Tube c2 = random_departure(p.grid, rng);
    const CellSet a = bat.basin(with_departure(p, c1), r).cells;
    const CellSet b = bat.basin(with_departure(p, c2), r).cells;
    const CellSet ab = bat.basin(with_departure(p, Tube::union_of({c1, c2})), r).cells;
    if (!(ab == (a | b))) ++failures;
  }
  return {"dilation", failures == 0,
          describe(static_cast<std::size_t>(failures), kPairs, "failing departure pairs")};
}

CheckResult check_labels(const ProblemSpec& p, const CournotGraph& g) {
  const GridSpec& grid = g.grid;
  std::size_t bad = 0;
  g.cells.for_each([&](std::size_t f) {
    const Cell c = grid.cell(f);
    const auto s = g.label(c);
    if (!s || c.d > c.t || !in_departure(p, c.t - c.d, grid.state_index(*s))) ++bad;
  });
  return {"start-labels", bad == 0, describe(bad, g.cells.count(), "bad labels")};
}

CheckResult check_membership(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                             std::mt19937_64& rng) {
  constexpr std::size_t kTargets = 20;
  const std::vector<std::size_t> set = g.cells.indices();
  if (set.empty()) return {"membership-persistence", true, "empty graph"};
  const GridSpec& grid = g.grid;
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < kTargets; ++i) {
    const Cell c = grid.cell(set[pick(rng)]);
    const double T = grid.t_axis.value(c.t);
    const StateVec x = grid.state_point(c.x);
    const Trajectory tr = synthesize(p, r, g, T, x, grid.d_axis.value(c.d));
    bool ok = membership_persistent(g, tr) && follows_dynamics(p, r, tr);
    const StateVec& end = tr.states.back();
    for (std::size_t k = 0; k < grid.dim(); ++k) {
      ok = ok && std::abs(end[k] - x[k]) <= grid.x_axes[k].step * (1.0 + 1e-9);
    }
    if (!ok) ++bad;
  }
  return {"membership-persistence", bad == 0, describe(bad, kTargets, "bad trajectories")};
}

CheckResult check_threads(const ProblemSpec& p, const StepRule& r) {
  const char* prior = std::getenv("COURNOT_THREADS");
  const std::string saved = prior ? prior : "";
  setenv("COURNOT_THREADS", "1", 1);
  const CournotGraph one = capture_basin(p, r);
  setenv("COURNOT_THREADS", "4", 1);
  const CournotGraph four = capture_basin(p, r);
  if (prior) {
    setenv("COURNOT_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("COURNOT_THREADS");
  }
  const bool same = one.cells == four.cells && one.labels == four.labels && one.stats == four.stats;
  return {"thread-determinism", same, same ? "1 and 4 workers agree" : "1 and 4 workers differ"};
}

}  // namespace

std::vector<CheckResult> run_checks(const ProblemSpec& p, int dilation_radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const StepRule r = step_rule(p, dilation_radius);
  Battery bat;
  bat.results.push_back(check_oracle(p, r));
  bat.results.push_back(check_adjoint(p, r));
  const CournotGraph g = bat.basin(p, r);
  bat.results.push_back(check_labels(p, g));
  bat.results.push_back(check_membership(p, r, g, rng));
  bat.results.push_back(check_dilation(bat, p, r, rng));
  bat.results.push_back({"fixed-point", bat.fixed_point_failures == 0,
                         describe(bat.fixed_point_failures, bat.basins, "basins failing")});
  bat.results.push_back(check_threads(p, r));
  return bat.results;
}

}  // namespace cournot::cli
