#include "cournot/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "cournot/error.hpp"
#include "cournot/format.hpp"

namespace cournot {

std::optional<std::size_t> Trajectory::sample_index(double t) const {
  if (states.empty() || h <= 0.0) {
    if (!states.empty() && std::abs(t - t0) <= 1e-9) return 0;
    return std::nullopt;
  }
  const double r = std::round((t - t0) / h);
  if (r < 0.0 || r >= static_cast<double>(states.size())) return std::nullopt;
  const auto i = static_cast<std::size_t>(r);
  if (std::abs(time(i) - t) > 0.5 * h + 1e-9 * h) return std::nullopt;
  return i;
}

std::optional<StateVec> Trajectory::sample(double t) const {
  if (auto i = sample_index(t)) return states[*i];
  return std::nullopt;
}

Trajectory restrict(const Trajectory& tr, double t_lo, double t_hi) {
  Trajectory out = tr;
  out.states.clear();
  const double eps = 1e-9 * std::max(1.0, tr.h);
  bool first = true;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const double t = tr.time(i);
    if (t < t_lo - eps || t > t_hi + eps) continue;
    if (first) {
      out.t0 = t;
      first = false;
    }
    out.states.push_back(tr.states[i]);
  }
  return out;
}

const char* role_name(TrajectoryRole role) {
  switch (role) {
    case TrajectoryRole::cournot: return "cournot";
    case TrajectoryRole::evader: return "evader";
    case TrajectoryRole::pursuer: return "pursuer";
  }
  return "cournot";
}

TrajectoryRole parse_role(const std::string& name) {
  if (name == "cournot") return TrajectoryRole::cournot;
  if (name == "evader") return TrajectoryRole::evader;
  if (name == "pursuer") return TrajectoryRole::pursuer;
  throw SchemaError("unknown trajectory role '" + name + "'");
}

std::string export_trajectory_csv(const Trajectory& tr) {
  std::string out;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    out += format_real(tr.time(i));
    out += ',';
    append_state(out, tr.states[i], tr.dim);
    out += '\n';
  }
  return out;
}

}  // namespace cournot
