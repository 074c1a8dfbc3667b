#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cournot/cell_set.hpp"
#include "cournot/problem.hpp"
#include "cournot/reach.hpp"

namespace cournot::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant battery on p: oracle equivalence on a shrunken grid,
/// successor/predecessor adjointness, dilation over random departure pairs,
/// fixed points, start labels, synthesized-trajectory membership and thread
/// determinism. Random draws come from `seed`.
std::vector<CheckResult> run_checks(const ProblemSpec& p, int dilation_radius, std::uint64_t seed);

/// Breadth-first enumeration of all viable chains from departure cells.
CellSet bfs_basin(const ProblemSpec& p, const StepRule& r);

/// p restricted to the first max_td time/duration nodes and the central
/// max_x nodes of each state axis.
ProblemSpec shrink(const ProblemSpec& p, std::size_t max_td, std::size_t max_x);

}  // namespace cournot::cli
