#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cournot/grid.hpp"

namespace cournot {

enum class TrajectoryRole { cournot, evader, pursuer };

/// Uniformly sampled evolution: states[i] is the state at t0 + i * h.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t dim = 1;
  std::vector<StateVec> states;
  TrajectoryRole role = TrajectoryRole::cournot;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * h; }
  double end_time() const { return time(states.empty() ? 0 : states.size() - 1); }
  /// Index of the sample nearest to t, if t is within h/2 of the sampled span.
  std::optional<std::size_t> sample_index(double t) const;
  std::optional<StateVec> sample(double t) const;

  bool operator==(const Trajectory&) const = default;
};

/// Samples of tr whose times lie in [t_lo, t_hi]; empty states if none.
Trajectory restrict(const Trajectory& tr, double t_lo, double t_hi);

const char* role_name(TrajectoryRole role);
TrajectoryRole parse_role(const std::string& name);

/// CSV rows `t,x1[,x2[,x3]]`, one per sample, no header.
std::string export_trajectory_csv(const Trajectory& tr);

}  // namespace cournot
