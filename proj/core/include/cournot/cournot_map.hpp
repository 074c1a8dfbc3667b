#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cournot/basin.hpp"
#include "cournot/cell_set.hpp"

namespace cournot {

/// Minimal aperture per (t, x); index count_d encodes +infinity.
struct ApertureField {
  GridSpec grid;
  std::vector<std::uint32_t> index;  // (t, state) row-major

  std::uint32_t infinite() const { return static_cast<std::uint32_t>(grid.d_axis.count); }
  bool finite(std::size_t t, std::size_t state) const { return at(t, state) != infinite(); }
  std::uint32_t at(std::size_t t, std::size_t state) const {
    return index[t * grid.state_count() + state];
  }
  /// Aperture value, +inf when no window reaches (t, x).
  double value(std::size_t t, std::size_t state) const;
  /// Reciprocal aperture; +inf at zero aperture, 0 where unreachable.
  double liquidity(std::size_t t, std::size_t state) const;
  double value_at(double t, const StateVec& x) const;
};

ApertureField aperture(const CournotGraph& g);

/// Arrival tube over (t, x...): states reachable at t through some window.
CellSet arrival_tube(const CournotGraph& g);
/// Slice of the arrival tube at time index t, shape (x...).
CellSet arrival_at(const CournotGraph& g, std::size_t t);

/// Starting states s in C(T - Omega) linked to (T, x) by a chain of set
/// cells. Result has shape (x...). Throws NotInGraph.
CellSet starting_states(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                        double T, const StateVec& x, double omega);
CellSet starting_states(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                        const Cell& target);

struct EarliestStart {
  double omega = 0.0;
  std::size_t omega_index = 0;
  CellSet states;
};

/// Starting states at the minimal aperture. Throws NotInGraph.
EarliestStart earliest_starting(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                                double T, const StateVec& x);

/// Greedy backtrack from a set cell: each step goes to the lowest-index set
/// predecessor. Returns cells from the d = 0 ancestor up to c.
std::vector<Cell> backtrack(const ProblemSpec& p, const StepRule& r, const CournotGraph& g,
                            const Cell& c);

/// CSV `t,x...,aperture[,liquidity]` for every (t, x), `inf` sentinels, no header.
std::string export_aperture_csv(const ApertureField& a, bool liquidity = false);
/// CSV `t,x...` for members of the arrival tube.
std::string export_arrival_csv(const GridSpec& grid, const CellSet& tube);

}  // namespace cournot
