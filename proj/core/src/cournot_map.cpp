#include "cournot/cournot_map.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "cournot/error.hpp"
#include "cournot/format.hpp"

namespace cournot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Cell graph_cell(const CournotGraph& g, double T, const StateVec& x, double omega) {
  try {
    return cell_of(g.grid, Point{T, omega, x});
  } catch (const OutOfBounds& e) {
    throw NotInGraph(std::string("target off the grid: ") + e.what());
  }
}

/// Layer-by-layer backward reach from target inside g; frontier[k] is the
/// set of states at (T - W + k, k) that reach the target.
std::vector<std::vector<std::uint8_t>> backward_frontiers(const ProblemSpec& p, const StepRule& r,
                                                          const CournotGraph& g, const Cell& target) {
  if (!g.contains(target)) throw NotInGraph("cell is not in the Cournot graph");
  const GridSpec& grid = g.grid;
  const std::size_t states = grid.state_count();
  const std::size_t start_t = target.t - target.d;
  std::vector<std::vector<std::uint8_t>> frontier(target.d + 1, std::vector<std::uint8_t>(states, 0));
  frontier[target.d][grid.state_flat(target.x)] = 1;
  for (std::size_t k = target.d; k-- > 0;) {
    const std::size_t t = start_t + k;
    const std::size_t base = grid.flat(t, k, 0);
    g.cells.for_each_in(base, base + states, [&](std::size_t f) {
      const std::size_t s = f - base;
      for (std::size_t next : successor_states(p, r, Cell{t, k, grid.state_index(s)})) {
        if (frontier[k + 1][next]) {
          frontier[k][s] = 1;
          break;
        }
      }
    });
  }
  return frontier;
}

}  // namespace

double ApertureField::value(std::size_t t, std::size_t state) const {
  const std::uint32_t k = at(t, state);
  return k == infinite() ? kInf : grid.d_axis.value(k);
}

double ApertureField::liquidity(std::size_t t, std::size_t state) const {
  const double a = value(t, state);
  if (a == kInf) return 0.0;
  if (a == 0.0) return kInf;
  return 1.0 / a;
}

double ApertureField::value_at(double t, const StateVec& x) const {
  auto ti = grid.t_axis.try_index(t);
  auto xi = grid.try_state_index(x);
  if (!ti || !xi) return kInf;
  return value(*ti, grid.state_flat(*xi));
}

ApertureField aperture(const CournotGraph& g) {
  const GridSpec& grid = g.grid;
  const std::size_t states = grid.state_count();
  const auto inf = static_cast<std::uint32_t>(grid.d_axis.count);
  ApertureField a{grid, std::vector<std::uint32_t>(grid.t_axis.count * states, inf)};
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    for (std::size_t d = 0; d < grid.d_axis.count && d <= t; ++d) {
      const std::size_t base = grid.flat(t, d, 0);
      g.cells.for_each_in(base, base + states, [&](std::size_t f) {
        auto& slot = a.index[t * states + (f - base)];
        slot = std::min(slot, static_cast<std::uint32_t>(d));
      });
    }
  }
  return a;
}

CellSet arrival_tube(const CournotGraph& g) {
  const GridSpec& grid = g.grid;
  const std::size_t states = grid.state_count();
  CellSet out = CellSet::over_time_states(grid);
  g.cells.for_each([&](std::size_t f) {
    const std::size_t t = f / (grid.d_axis.count * states);
    out.set(t * states + f % states);
  });
  return out;
}

CellSet arrival_at(const CournotGraph& g, std::size_t t) {
  if (t >= g.grid.t_axis.count) throw IndexOutOfRange("time index out of range");
  const std::size_t states = g.grid.state_count();
  CellSet out = CellSet::over_states(g.grid);
  for (std::size_t d = 0; d < g.grid.d_axis.count; ++d) {
    const std::size_t base = g.grid.flat(t, d, 0);
    g.cells.for_each_in(base, base + states, [&](std::size_t f) { out.set(f - base); });
  }
  return out;
}

CellSet starting_states(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                        const Cell& target) {
  const auto frontier = backward_frontiers(p, r, g, target);
  CellSet out = CellSet::over_states(g.grid);
  for (std::size_t s = 0; s < frontier[0].size(); ++s) {
    if (frontier[0][s]) out.set(s);
  }
  return out;
}

CellSet starting_states(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                        double T, const StateVec& x, double omega) {
  return starting_states(p, r, g, graph_cell(g, T, x, omega));
}

EarliestStart earliest_starting(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                                double T, const StateVec& x) {
  const ApertureField a = aperture(g);
  const Cell c = graph_cell(g, T, x, 0.0);
  const std::size_t s = g.grid.state_flat(c.x);
  if (!a.finite(c.t, s)) throw NotInGraph("state is not in the arrival tube at T");
  const std::uint32_t k = a.at(c.t, s);
  return EarliestStart{g.grid.d_axis.value(k), k, starting_states(p, r, g, Cell{c.t, k, c.x})};
}

std::vector<Cell> backtrack(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                            const Cell& c) {
  if (!g.contains(c)) throw NotInGraph("cell is not in the Cournot graph");
  std::vector<Cell> chain{c};
  Cell cur = c;
  while (cur.d > 0) {
    bool found = false;
    for (const Cell& prev : predecessors(p, r, cur)) {
      if (g.contains(prev)) {
        cur = prev;
        found = true;
        break;
      }
    }
    if (!found) throw NotInGraph("set cell without a set predecessor");
    chain.push_back(cur);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::string export_aperture_csv(const ApertureField& a, bool liquidity) {
  const GridSpec& grid = a.grid;
  const std::size_t states = grid.state_count();
  std::string out;
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      out += format_real(grid.t_axis.value(t));
      out += ',';
      append_state(out, grid.state_point(s), grid.dim());
      out += ',';
      out += format_real(a.value(t, s));
      if (liquidity) {
        out += ',';
        out += format_real(a.liquidity(t, s));
      }
      out += '\n';
    }
  }
  return out;
}

std::string export_arrival_csv(const GridSpec& grid, const CellSet& tube) {
  const std::size_t states = grid.state_count();
  std::string out;
  tube.for_each([&](std::size_t f) {
    out += format_real(grid.t_axis.value(f / states));
    out += ',';
    append_state(out, grid.state_point(f % states), grid.dim());
    out += '\n';
  });
  return out;
}

}  // namespace cournot
