#pragma once

#include <cstddef>
#include <vector>

#include "cournot/grid.hpp"
#include "cournot/problem.hpp"

namespace cournot {

/// Explicit Euler step with nearest-cell rounding and an optional box
/// dilation of the landing cell.
struct StepRule {
  double h = 0.0;
  int dilation_radius = 0;
};

/// Step rule matching the problem grid; throws ValidationError on a bad radius.
StepRule step_rule(const ProblemSpec& p, int dilation_radius = 0);
void validate_rule(const ProblemSpec& p, const StepRule& r);

/// Landing cells of a single control sample.
struct ControlStep {
  std::size_t control = 0;
  StateVec target{};                 // exact Euler point x + h f(t, d, x, u)
  std::vector<std::size_t> states;   // flat state indices at (t + h, d + h), ascending
};

/// Per-control landing sets from c; empty when (t + h, d + h) leaves the grid.
/// Landing cells outside the state range are dropped and counted in *clipped.
std::vector<ControlStep> control_steps(const ProblemSpec& p, const StepRule& r, const Cell& c,
                                       std::size_t* clipped = nullptr);

/// Union of control_steps, as ascending flat state indices.
std::vector<std::size_t> successor_states(const ProblemSpec& p, const StepRule& r, const Cell& c,
                                          std::size_t* clipped = nullptr);

/// Cells at (t + h, d + h) reachable in one step, ascending.
std::vector<Cell> successors(const ProblemSpec& p, const StepRule& r, const Cell& c,
                             std::size_t* clipped = nullptr);

/// Exact adjoint of successors: cells c' at (t - h, d - h) with c in
/// successors(c'). Empty when t or d is already at its first node.
std::vector<Cell> predecessors(const ProblemSpec& p, const StepRule& r, const Cell& c);

}  // namespace cournot
