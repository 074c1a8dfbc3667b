#include "cournot/reach.hpp"

#include <algorithm>
#include <cmath>

#include "cournot/error.hpp"

namespace cournot {

StepRule step_rule(const ProblemSpec& p, int dilation_radius) {
  StepRule r{p.grid.t_axis.step, dilation_radius};
  validate_rule(p, r);
  return r;
}

void validate_rule(const ProblemSpec& p, const StepRule& r) {
  if (r.dilation_radius != 0 && r.dilation_radius != 1) {
    throw ValidationError("dilation radius must be 0 or 1");
  }
  if (std::abs(r.h - p.grid.t_axis.step) > 1e-12 * p.grid.t_axis.step) {
    throw ValidationError("step rule h must equal the grid time step");
  }
}

std::vector<ControlStep> control_steps(const ProblemSpec& p, const StepRule& r, const Cell& c,
                                       std::size_t* clipped) {
  const GridSpec& g = p.grid;
  std::vector<ControlStep> out;
  if (c.t + 1 >= g.t_axis.count || c.d + 1 >= g.d_axis.count) return out;

  const std::size_t n = g.dim();
  const long radius = r.dilation_radius;
  const long span = 2 * radius + 1;
  long combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= span;

  const StateVec x = g.state_point(c.x);
  for (auto& cs : controls_at(p, c)) {
    ControlStep step;
    step.control = cs.index;
    std::array<long, kMaxStateDim> centre{};
    for (std::size_t i = 0; i < n; ++i) {
      step.target[i] = x[i] + r.h * cs.velocity[i];
      const Axis& a = g.x_axes[i];
      centre[i] = std::lround((step.target[i] - a.lo) / a.step);
    }
    for (long k = 0; k < combos; ++k) {
      long rest = k;
      bool inside = true;
      StateIndex s{};
      for (std::size_t i = n; i-- > 0;) {
        const long idx = centre[i] + (rest % span) - radius;
        rest /= span;
        if (idx < 0 || idx >= static_cast<long>(g.x_axes[i].count)) {
          inside = false;
        } else {
          s[i] = static_cast<std::size_t>(idx);
        }
      }
      if (!inside) {
        if (clipped) ++*clipped;
        continue;
      }
      step.states.push_back(g.state_flat(s));
    }
    std::sort(step.states.begin(), step.states.end());
    step.states.erase(std::unique(step.states.begin(), step.states.end()), step.states.end());
    out.push_back(std::move(step));
  }
  return out;
}

std::vector<std::size_t> successor_states(const ProblemSpec& p, const StepRule& r, const Cell& c,
                                          std::size_t* clipped) {
  std::vector<std::size_t> out;
  for (const auto& step : control_steps(p, r, c, clipped)) {
    out.insert(out.end(), step.states.begin(), step.states.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Cell> successors(const ProblemSpec& p, const StepRule& r, const Cell& c,
                             std::size_t* clipped) {
  validate_rule(p, r);
  std::vector<Cell> out;
  for (std::size_t s : successor_states(p, r, c, clipped)) {
    out.push_back(Cell{c.t + 1, c.d + 1, p.grid.state_index(s)});
  }
  return out;
}

std::vector<Cell> predecessors(const ProblemSpec& p, const StepRule& r, const Cell& c) {
  validate_rule(p, r);
  std::vector<Cell> out;
  if (c.t == 0 || c.d == 0) return out;
  const std::size_t target = p.grid.state_flat(c.x);
  const std::size_t states = p.grid.state_count();
  for (std::size_t s = 0; s < states; ++s) {
    const Cell src{c.t - 1, c.d - 1, p.grid.state_index(s)};
    const auto succ = successor_states(p, r, src);
    if (std::binary_search(succ.begin(), succ.end(), target)) out.push_back(src);
  }
  return out;
}

}  // namespace cournot
