#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

namespace cournot {

inline constexpr std::size_t kMaxStateDim = 3;

/// State vector; components at or beyond the grid dimension are zero.
using StateVec = std::array<double, kMaxStateDim>;
/// Per-axis state lattice index; unused components are zero.
using StateIndex = std::array<std::size_t, kMaxStateDim>;

/// Uniform lattice `lo, lo + step, ..., hi` with `count` nodes.
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  /// Builds an axis from its bounds; count = round((hi - lo) / step) + 1.
  /// Throws ValidationError unless step > 0, count >= 2 and hi is on the lattice.
  static Axis make(double lo, double hi, double step);

  double value(std::size_t i) const { return lo + static_cast<double>(i) * step; }

  /// Nearest node, or nullopt when `v` is more than step/2 outside [lo, hi].
  std::optional<std::size_t> try_index(double v) const;
  /// Same as try_index but throws OutOfBounds.
  std::size_t index(double v) const;

  bool operator==(const Axis&) const = default;
};

/// Lattice cell of the (time, duration, state) grid.
struct Cell {
  std::size_t t = 0;
  std::size_t d = 0;
  StateIndex x{};

  auto operator<=>(const Cell&) const = default;
};

struct Point {
  double t = 0.0;
  double d = 0.0;
  StateVec x{};
};

/// Time, duration and state axes. Time and duration share a step and the
/// duration axis starts at zero, so one sweep step advances both by one cell.
struct GridSpec {
  Axis t_axis;
  Axis d_axis;
  std::vector<Axis> x_axes;

  /// Validates the cross-axis invariants and returns the grid.
  static GridSpec make(Axis t, Axis d, std::vector<Axis> x);

  std::size_t dim() const { return x_axes.size(); }
  std::size_t state_count() const;
  std::size_t cell_count() const { return t_axis.count * d_axis.count * state_count(); }

  /// Row-major flattening of a state index (first axis slowest).
  std::size_t state_flat(const StateIndex& s) const;
  StateIndex state_index(std::size_t flat) const;

  /// Flat index of a cell: ((t * count_d) + d) * state_count + state_flat.
  std::size_t flat(const Cell& c) const {
    return (c.t * d_axis.count + c.d) * state_count() + state_flat(c.x);
  }
  std::size_t flat(std::size_t t, std::size_t d, std::size_t state) const {
    return (t * d_axis.count + d) * state_count() + state;
  }
  Cell cell(std::size_t flat) const;

  StateVec state_point(const StateIndex& s) const;
  StateVec state_point(std::size_t flat) const { return state_point(state_index(flat)); }
  /// Nearest state node; nullopt if any coordinate is off the grid.
  std::optional<StateIndex> try_state_index(const StateVec& x) const;
  /// Throws OutOfBounds.
  StateIndex state_index_of(const StateVec& x) const;

  bool operator==(const GridSpec&) const = default;
};

/// Nearest lattice cell, rounding half away from zero on every axis.
Cell cell_of(const GridSpec& g, const Point& p);
/// Lattice coordinates of a cell; throws IndexOutOfRange.
Point point_of(const GridSpec& g, const Cell& c);

}  // namespace cournot
