#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cournot/basin.hpp"
#include "cournot/trajectory.hpp"

namespace cournot {

/// Cells of the window [T - W, T] that lie on some chain of set cells from
/// a departure cell to the target (T, W, x).
struct BridgeSet {
  Cell target;
  CellSet cells;  // shape (t, d, x...)

  bool contains(const GridSpec& g, const Cell& c) const { return cells.test(g.flat(c)); }
};

enum class Policy { minimal_norm, first_sample };

Policy parse_policy(const std::string& name);

/// Throws NotInGraph when the target cell is unset.
BridgeSet bridge(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, const Cell& target);
BridgeSet bridge(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, double T,
                 const StateVec& x, double omega);

/// Control indices whose Euler step lands in the bridge's next layer.
/// Throws NotInBridge off the bridge or at the terminal cell.
std::vector<std::size_t> regulation_set(const ProblemSpec& p, const StepRule& r, const BridgeSet& b,
                                        const Cell& c);
std::vector<std::size_t> regulation_set(const ProblemSpec& p, const StepRule& r, const BridgeSet& b,
                                        double t, double d, const StateVec& z);

/// Viable evolution reaching x at T. The aperture defaults to the minimal
/// one. The departure state is the graph's start label for the target when
/// available, otherwise the lowest-index departure cell of the bridge. Each
/// step takes a control from the regulation set by policy (smallest control
/// norm, ties to the lower index; or simply the lowest index).
/// Throws NotInGraph; when an explicit aperture misses the graph the message
/// names the nearest feasible apertures.
Trajectory synthesize(const ProblemSpec& p, const StepRule& r, const CournotGraph& g, double T,
                      const StateVec& x, std::optional<double> omega = std::nullopt,
                      Policy policy = Policy::minimal_norm);

/// Joins a and b. b must start within one time step and one cell per axis of
/// a's last sample; b's first sample is dropped. Throws MismatchedJunction.
Trajectory concatenate(const GridSpec& g, const Trajectory& a, const Trajectory& b);

/// Checks that every sample of tr, read against the window ending at
/// tr's last sample, is a set cell of g: (t, t - t0, x(t)) for all t.
bool membership_persistent(const CournotGraph& g, const Trajectory& tr);

/// Checks that consecutive samples of tr follow `successors`.
bool follows_dynamics(const ProblemSpec& p, const StepRule& r, const Trajectory& tr);

}  // namespace cournot
