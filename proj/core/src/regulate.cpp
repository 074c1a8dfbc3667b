#include "cournot/regulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cournot/cournot_map.hpp"
#include "cournot/error.hpp"
#include "cournot/format.hpp"

namespace cournot {

Policy parse_policy(const std::string& name) {
  if (name == "minimal-norm") return Policy::minimal_norm;
  if (name == "first-sample") return Policy::first_sample;
  throw SchemaError("policy must be minimal-norm or first-sample");
}

BridgeSet bridge(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, const Cell& target) {
  if (!g.contains(target)) throw NotInGraph("target cell is not in the Cournot graph");
  const GridSpec& grid = g.grid;
  const std::size_t states = grid.state_count();
  const std::size_t start_t = target.t - target.d;
  BridgeSet b{target, CellSet::over_cells(grid)};
  b.cells.set(grid.flat(target));
  for (std::size_t k = target.d; k-- > 0;) {
    const std::size_t t = start_t + k;
    const std::size_t base = grid.flat(t, k, 0);
    const std::size_t next_base = grid.flat(t + 1, k + 1, 0);
    g.cells.for_each_in(base, base + states, [&](std::size_t f) {
      for (std::size_t s : successor_states(p, r, Cell{t, k, grid.state_index(f - base)})) {
        if (b.cells.test(next_base + s)) {
          b.cells.set(f);
          break;
        }
      }
    });
  }
  return b;
}

BridgeSet bridge(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, double T,
                 const StateVec& x, double omega) {
  Cell c;
  try {
    c = cell_of(g.grid, Point{T, omega, x});
  } catch (const OutOfBounds& e) {
    throw NotInGraph(std::string("target off the grid: ") + e.what());
  }
  return bridge(p, r, g, c);
}

namespace {

bool is_bridge_step(const GridSpec& g, const BridgeSet& b, const Cell& c, const ControlStep& step) {
  const std::size_t next_base = g.flat(c.t + 1, c.d + 1, 0);
  return std::any_of(step.states.begin(), step.states.end(),
                     [&](std::size_t s) { return b.cells.test(next_base + s); });
}

void require_on_bridge(const GridSpec& g, const BridgeSet& b, const Cell& c) {
  if (!b.contains(g, c)) throw NotInBridge("cell is not on the bridge");
  if (c.d >= b.target.d) throw NotInBridge("no step remains at the terminal cell");
}

double norm(const std::vector<double>& u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<std::size_t> regulation_set(const ProblemSpec& p, const StepRule& r, const BridgeSet& b,
                                        const Cell& c) {
  require_on_bridge(p.grid, b, c);
  std::vector<std::size_t> out;
  for (const ControlStep& step : control_steps(p, r, c)) {
    if (is_bridge_step(p.grid, b, c, step)) out.push_back(step.control);
  }
  return out;
}

std::vector<std::size_t> regulation_set(const ProblemSpec& p, const StepRule& r, const BridgeSet& b,
                                        double t, double d, const StateVec& z) {
  Cell c;
  try {
    c = cell_of(p.grid, Point{t, d, z});
  } catch (const OutOfBounds& e) {
    throw NotInBridge(std::string("cell off the grid: ") + e.what());
  }
  return regulation_set(p, r, b, c);
}

Trajectory synthesize(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, double T,
                      const StateVec& x, std::optional<double> omega, Policy policy) {
  const GridSpec& grid = g.grid;
  Cell end;
  try {
    end = cell_of(grid, Point{T, 0.0, x});
  } catch (const OutOfBounds& e) {
    throw NotInGraph(std::string("target off the grid: ") + e.what());
  }
  const std::size_t state = grid.state_flat(end.x);
  const ApertureField ap = aperture(g);
  if (!ap.finite(end.t, state)) throw NotInGraph("state is not in the arrival tube at T");

  if (omega) {
    auto k = grid.d_axis.try_index(*omega);
    end.d = k ? *k : grid.d_axis.count;
    if (!k || !g.contains(end)) {
      std::optional<double> below, above;
      for (std::size_t d = 0; d < grid.d_axis.count && d <= end.t; ++d) {
        if (!g.contains(Cell{end.t, d, end.x})) continue;
        const double w = grid.d_axis.value(d);
        if (w < *omega) below = w;
        if (w > *omega && !above) above = w;
      }
      std::ostringstream os;
      os << "aperture " << format_real(*omega) << " does not reach the target; nearest feasible:";
      os << " below=" << (below ? format_real(*below) : "none");
      os << " above=" << (above ? format_real(*above) : "none");
      throw NotInGraph(os.str());
    }
  } else {
    end.d = ap.at(end.t, state);
  }

  const BridgeSet b = bridge(p, r, g, end);
  const std::size_t start_t = end.t - end.d;
  const std::size_t states = grid.state_count();

  std::optional<std::size_t> start;
  if (auto l = g.label(end); l && b.cells.test(grid.flat(start_t, 0, *l))) start = *l;
  if (!start) {
    const std::size_t base = grid.flat(start_t, 0, 0);
    b.cells.for_each_in(base, base + states, [&](std::size_t f) {
      if (!start) start = f - base;
    });
  }
  if (!start) throw NotInGraph("bridge has no departure cell");

  Trajectory tr;
  tr.t0 = grid.t_axis.value(start_t);
  tr.h = r.h;
  tr.dim = grid.dim();
  tr.role = TrajectoryRole::cournot;
  Cell cur{start_t, 0, grid.state_index(*start)};
  tr.states.push_back(grid.state_point(cur.x));

  while (cur.d < end.d) {
    const auto steps = control_steps(p, r, cur);
    const auto controls = controls_at(p, cur);
    const ControlStep* chosen = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const ControlStep& step : steps) {
      if (!is_bridge_step(grid, b, cur, step)) continue;
      if (policy == Policy::first_sample) {
        chosen = &step;
        break;
      }
      const double n = norm(controls[step.control].u);
      if (n < best) {
        best = n;
        chosen = &step;
      }
    }
    if (chosen == nullptr) throw NotInGraph("regulation set is empty on the bridge");

    const std::size_t next_base = grid.flat(cur.t + 1, cur.d + 1, 0);
    std::optional<std::size_t> next;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t s : chosen->states) {
      if (!b.cells.test(next_base + s)) continue;
      const StateVec z = grid.state_point(s);
      double dist = 0.0;
      for (std::size_t i = 0; i < grid.dim(); ++i) dist += (z[i] - chosen->target[i]) * (z[i] - chosen->target[i]);
      if (dist < best_dist) {
        best_dist = dist;
        next = s;
      }
    }
    cur = Cell{cur.t + 1, cur.d + 1, grid.state_index(*next)};
    tr.states.push_back(grid.state_point(cur.x));
  }
  return tr;
}

Trajectory concatenate(const GridSpec& g, const Trajectory& a, const Trajectory& b) {
  if (a.states.empty() || b.states.empty()) throw MismatchedJunction("cannot join an empty trajectory");
  if (a.dim != b.dim) throw MismatchedJunction("trajectories differ in dimension");
  const double h = a.states.size() > 1 ? a.h : b.h;
  if (a.states.size() > 1 && b.states.size() > 1 && std::abs(a.h - b.h) > 1e-9 * std::max(a.h, b.h)) {
    throw MismatchedJunction("trajectories use different time steps");
  }
  const double eps = 1e-9 * std::max(1.0, h);
  if (std::abs(a.end_time() - b.t0) > h + eps) {
    throw MismatchedJunction("junction times differ by more than one step");
  }
  for (std::size_t i = 0; i < a.dim; ++i) {
    const double step = g.x_axes[i].step;
    if (std::abs(a.states.back()[i] - b.states.front()[i]) > step * (1.0 + 1e-9)) {
      throw MismatchedJunction("junction states differ by more than one cell");
    }
  }
  Trajectory out = a;
  out.h = h;
  out.states.insert(out.states.end(), b.states.begin() + 1, b.states.end());
  return out;
}

bool membership_persistent(const CournotGraph& g, const Trajectory& tr) {
  if (tr.states.empty()) return false;
  const GridSpec& grid = g.grid;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const double t = tr.time(i);
    const double d = t - tr.t0;
    auto ti = grid.t_axis.try_index(t);
    auto di = grid.d_axis.try_index(d);
    auto xi = grid.try_state_index(tr.states[i]);
    if (!ti || !di || !xi) return false;
    if (!g.contains(Cell{*ti, *di, *xi})) return false;
  }
  return true;
}

bool follows_dynamics(const ProblemSpec& p, const StepRule& r, const Trajectory& tr) {
  const GridSpec& grid = p.grid;
  for (std::size_t i = 0; i + 1 < tr.states.size(); ++i) {
    auto ti = grid.t_axis.try_index(tr.time(i));
    auto di = grid.d_axis.try_index(tr.time(i) - tr.t0);
    auto xi = grid.try_state_index(tr.states[i]);
    auto xn = grid.try_state_index(tr.states[i + 1]);
    if (!ti || !di || !xi || !xn) return false;
    const auto succ = successor_states(p, r, Cell{*ti, *di, *xi});
    if (!std::binary_search(succ.begin(), succ.end(), grid.state_flat(*xn))) return false;
  }
  return true;
}

}  // namespace cournot
