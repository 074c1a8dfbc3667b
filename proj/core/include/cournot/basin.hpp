#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cournot/cell_set.hpp"
#include "cournot/problem.hpp"
#include "cournot/reach.hpp"

namespace cournot {

struct SweepStats {
  std::size_t layers = 0;          // duration layers swept
  std::size_t seed_cells = 0;      // cells set in layer d = 0
  std::size_t set_cells = 0;
  std::size_t clipped = 0;         // landing cells dropped at the state boundary
  std::size_t pre_grid_cells = 0;  // cells with t - d before the first grid time

  bool operator==(const SweepStats&) const = default;
};

enum class BasinStatus { ok, empty_basin };

inline constexpr std::uint32_t kNoLabel = std::numeric_limits<std::uint32_t>::max();

/// Discrete graph of the Cournot map over (t, d, x) cells.
///
/// A set cell (T, W, x) means some viable evolution over [T - W, T] starts
/// in C(T - W) and ends at x. labels[flat] holds the flat state index of one
/// such starting state (kNoLabel for unset cells); it is the d = 0 ancestor
/// reached by always stepping back to the lowest-index set predecessor.
struct CournotGraph {
  GridSpec grid;
  CellSet cells;
  std::vector<std::uint32_t> labels;
  SweepStats stats;
  BasinStatus status = BasinStatus::ok;

  bool contains(const Cell& c) const { return cells.test(grid.flat(c)); }
  bool has_labels() const { return !labels.empty(); }
  std::optional<std::size_t> label(const Cell& c) const;
};

struct BasinOptions {
  bool labels = true;
};

/// Cells of K, shape (t, d, x...).
CellSet env_cells(const ProblemSpec& p);
/// Cells of C, shape (t, x...).
CellSet departure_cells(const ProblemSpec& p);

/// Layered sweep over duration layers. Layer 0 holds C(t) inside K(t, 0);
/// layer k holds the cells of K with a set predecessor in layer k - 1.
/// Parallel within a layer; the result does not depend on the schedule.
CournotGraph capture_basin(const ProblemSpec& p, const StepRule& r, BasinOptions opts = {});

/// One application of the capture-basin operator over the whole lattice:
/// seed | (K & post(current)).
CellSet basin_step(const ProblemSpec& p, const StepRule& r, const CellSet& current);

/// Picard iteration of basin_step from the empty set until it stabilizes.
CellSet capture_basin_iterative(const ProblemSpec& p, const StepRule& r,
                                std::size_t* iterations = nullptr);

/// True iff basin_step leaves g.cells unchanged.
bool fixed_point_check(const ProblemSpec& p, const StepRule& r, const CournotGraph& g);

/// CSV rows `t,d,x1[,x2[,x3]]` for set cells, lexicographic, no header.
std::string export_graph_csv(const CournotGraph& g);
/// JSON sidecar: grid axes, counts, sweep statistics.
std::string export_graph_metadata(const CournotGraph& g);

}  // namespace cournot
