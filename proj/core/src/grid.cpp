#include "cournot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cournot/error.hpp"

namespace cournot {

Axis Axis::make(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || step <= 0.0) {
    throw ValidationError("axis requires finite bounds and a positive step");
  }
  if (hi <= lo) {
    throw ValidationError("axis requires hi > lo");
  }
  const double cells = std::round((hi - lo) / step);
  Axis a{lo, hi, step, static_cast<std::size_t>(cells) + 1};
  const double scale = std::max({std::abs(lo), std::abs(hi), step});
  if (std::abs(a.value(a.count - 1) - hi) > 1e-9 * scale) {
    std::ostringstream os;
    os << "axis [" << lo << ", " << hi << "] is not a whole number of steps " << step;
    throw ValidationError(os.str());
  }
  if (a.count < 2) {
    throw ValidationError("axis needs at least two nodes");
  }
  return a;
}

std::optional<std::size_t> Axis::try_index(double v) const {
  if (!std::isfinite(v)) return std::nullopt;
  // Ties break away from zero in coordinate space, not in index space.
  const double q = (v - lo) / step;
  double r = std::round(q);
  if (std::abs(q - std::floor(q) - 0.5) < 1e-9) r = v < 0.0 ? std::floor(q) : std::ceil(q);
  if (r < 0.0 || r >= static_cast<double>(count)) return std::nullopt;
  return static_cast<std::size_t>(r);
}

std::size_t Axis::index(double v) const {
  if (auto i = try_index(v)) return *i;
  std::ostringstream os;
  os << "coordinate " << v << " outside axis [" << lo << ", " << hi << "]";
  throw OutOfBounds(os.str());
}

GridSpec GridSpec::make(Axis t, Axis d, std::vector<Axis> x) {
  if (x.empty() || x.size() > kMaxStateDim) {
    throw ValidationError("state dimension must be between 1 and 3");
  }
  if (d.lo != 0.0) {
    throw ValidationError("duration axis must start at 0");
  }
  if (std::abs(t.step - d.step) > 1e-12 * std::max(t.step, d.step)) {
    throw ValidationError("time and duration axes must share one step");
  }
  for (const Axis* a : {&t, &d}) {
    if (a->count < 2) throw ValidationError("axis needs at least two nodes");
  }
  for (const Axis& a : x) {
    if (a.count < 2) throw ValidationError("axis needs at least two nodes");
  }
  return GridSpec{t, d, std::move(x)};
}

std::size_t GridSpec::state_count() const {
  std::size_t n = 1;
  for (const Axis& a : x_axes) n *= a.count;
  return n;
}

std::size_t GridSpec::state_flat(const StateIndex& s) const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < x_axes.size(); ++i) f = f * x_axes[i].count + s[i];
  return f;
}

StateIndex GridSpec::state_index(std::size_t flat) const {
  StateIndex s{};
  for (std::size_t i = x_axes.size(); i-- > 0;) {
    s[i] = flat % x_axes[i].count;
    flat /= x_axes[i].count;
  }
  return s;
}

Cell GridSpec::cell(std::size_t flat) const {
  const std::size_t states = state_count();
  Cell c;
  c.x = state_index(flat % states);
  flat /= states;
  c.d = flat % d_axis.count;
  c.t = flat / d_axis.count;
  return c;
}

StateVec GridSpec::state_point(const StateIndex& s) const {
  StateVec x{};
  for (std::size_t i = 0; i < x_axes.size(); ++i) x[i] = x_axes[i].value(s[i]);
  return x;
}

std::optional<StateIndex> GridSpec::try_state_index(const StateVec& x) const {
  StateIndex s{};
  for (std::size_t i = 0; i < x_axes.size(); ++i) {
    auto k = x_axes[i].try_index(x[i]);
    if (!k) return std::nullopt;
    s[i] = *k;
  }
  return s;
}

StateIndex GridSpec::state_index_of(const StateVec& x) const {
  StateIndex s{};
  for (std::size_t i = 0; i < x_axes.size(); ++i) s[i] = x_axes[i].index(x[i]);
  return s;
}

Cell cell_of(const GridSpec& g, const Point& p) {
  Cell c;
  c.t = g.t_axis.index(p.t);
  c.d = g.d_axis.index(p.d);
  c.x = g.state_index_of(p.x);
  return c;
}

Point point_of(const GridSpec& g, const Cell& c) {
  if (c.t >= g.t_axis.count || c.d >= g.d_axis.count) {
    throw IndexOutOfRange("time or duration index out of range");
  }
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (c.x[i] >= g.x_axes[i].count) throw IndexOutOfRange("state index out of range");
  }
  return Point{g.t_axis.value(c.t), g.d_axis.value(c.d), g.state_point(c.x)};
}

}  // namespace cournot
