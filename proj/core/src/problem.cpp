#include "cournot/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cournot/error.hpp"
#include "json_io.hpp"

namespace cournot {

using nlohmann::json;

namespace {

constexpr double kEps = 1e-9;

bool close_le(double a, double b) { return a <= b + kEps * std::max(1.0, std::abs(b)); }

}  // namespace

Tube Tube::everywhere() { return Tube{}; }

Tube Tube::box(std::vector<double> lo, std::vector<double> hi) {
  Tube t;
  t.kind = TubeKind::box;
  t.lo = std::move(lo);
  t.hi = std::move(hi);
  return t;
}

Tube Tube::ball(std::vector<double> center, double radius) {
  Tube t;
  t.kind = TubeKind::ball;
  t.center = std::move(center);
  t.radius = radius;
  return t;
}

Tube Tube::union_of(std::vector<Tube> members) {
  Tube t;
  t.kind = TubeKind::union_of;
  t.members = std::move(members);
  return t;
}

Tube Tube::time_window(double t_lo, double t_hi, std::optional<Tube> inner) {
  Tube t;
  t.kind = TubeKind::time_window;
  t.t_lo = t_lo;
  t.t_hi = t_hi;
  if (inner) t.members.push_back(std::move(*inner));
  return t;
}

Tube Tube::along(Trajectory tr, double tolerance_cells) {
  Tube t;
  t.kind = TubeKind::trajectory_singleton;
  t.trajectory = std::move(tr);
  t.tolerance = tolerance_cells;
  return t;
}

bool Tube::contains(const GridSpec& g, double t, double d, const StateVec& x) const {
  const std::size_t n = g.dim();
  switch (kind) {
    case TubeKind::everywhere:
      return true;
    case TubeKind::box:
      for (std::size_t i = 0; i < n; ++i) {
        if (!close_le(lo[i], x[i]) || !close_le(x[i], hi[i])) return false;
      }
      return true;
    case TubeKind::ball: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
      return close_le(std::sqrt(r2), radius);
    }
    case TubeKind::union_of:
      return std::any_of(members.begin(), members.end(),
                         [&](const Tube& m) { return m.contains(g, t, d, x); });
    case TubeKind::time_window:
      if (!close_le(t_lo, t) || !close_le(t, t_hi)) return false;
      if (d_lo && !close_le(*d_lo, d)) return false;
      if (d_hi && !close_le(d, *d_hi)) return false;
      return members.empty() || members.front().contains(g, t, d, x);
    case TubeKind::trajectory_singleton: {
      auto s = trajectory->sample(t);
      if (!s) return false;
      for (std::size_t i = 0; i < n; ++i) {
        const double step = g.x_axes[i].step;
        if (std::abs(x[i] - (*s)[i]) > (tolerance + kEps) * step) return false;
      }
      return true;
    }
  }
  return false;
}

// --- dynamics --------------------------------------------------------------

std::vector<ControlSample> controls_at(const ProblemSpec& p, const Cell& c) {
  const DynamicsSpec& dyn = p.dynamics;
  const std::size_t n = p.grid.dim();
  std::vector<ControlSample> out;
  if (dyn.family == DynamicsFamily::tabulated) {
    auto it = std::lower_bound(
        dyn.table.begin(), dyn.table.end(), c,
        [](const TabulatedVelocities& e, const Cell& key) { return e.cell < key; });
    if (it != dyn.table.end() && it->cell == c) {
      out.reserve(it->velocities.size());
      for (std::size_t k = 0; k < it->velocities.size(); ++k) {
        ControlSample cs{k, std::vector<double>(it->velocities[k].begin(),
                                                it->velocities[k].begin() + n),
                         it->velocities[k]};
        out.push_back(std::move(cs));
      }
      return out;
    }
  }
  const StateVec x = p.grid.state_point(c.x);
  out.reserve(dyn.control_samples.size());
  for (std::size_t k = 0; k < dyn.control_samples.size(); ++k) {
    const auto& u = dyn.control_samples[k];
    ControlSample cs{k, u, {}};
    if (dyn.family == DynamicsFamily::affine) {
      for (std::size_t i = 0; i < n; ++i) {
        double v = dyn.drift[i];
        for (std::size_t j = 0; j < n; ++j) v += dyn.a[i][j] * x[j];
        for (std::size_t j = 0; j < u.size(); ++j) v += dyn.b[i][j] * u[j];
        cs.velocity[i] = v;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) cs.velocity[i] = u[i];
    }
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<StateVec> velocities(const ProblemSpec& p, double t, double d, const StateVec& x) {
  const Cell c = cell_of(p.grid, Point{t, d, x});
  std::vector<StateVec> out;
  for (auto& cs : controls_at(p, c)) out.push_back(cs.velocity);
  return out;
}

bool in_env(const ProblemSpec& p, double t, double d, const StateVec& x) {
  return p.env.contains(p.grid, t, d, x);
}

bool in_departure(const ProblemSpec& p, double t, const StateVec& x) {
  return p.departure.contains(p.grid, t, 0.0, x);
}

bool in_env(const ProblemSpec& p, const Cell& c) {
  return p.env.contains(p.grid, p.grid.t_axis.value(c.t), p.grid.d_axis.value(c.d),
                        p.grid.state_point(c.x));
}

bool in_departure(const ProblemSpec& p, std::size_t t, const StateIndex& x) {
  return p.departure.contains(p.grid, p.grid.t_axis.value(t), 0.0, p.grid.state_point(x));
}

ProblemSpec with_departure(const ProblemSpec& p, Tube departure) {
  ProblemSpec q = p;
  q.departure = std::move(departure);
  return q;
}

// --- validation ------------------------------------------------------------

namespace {

void validate_tube(const Tube& tube, const GridSpec& g, const std::string& where) {
  const std::size_t n = g.dim();
  switch (tube.kind) {
    case TubeKind::everywhere:
      break;
    case TubeKind::box:
      if (tube.lo.size() != n || tube.hi.size() != n) {
        throw ValidationError(where + ": box bounds must match the state dimension");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (tube.lo[i] > tube.hi[i]) throw ValidationError(where + ": box has lo > hi");
      }
      break;
    case TubeKind::ball:
      if (tube.center.size() != n) {
        throw ValidationError(where + ": ball center must match the state dimension");
      }
      if (!(tube.radius >= 0.0)) throw ValidationError(where + ": ball radius must be >= 0");
      break;
    case TubeKind::union_of:
      for (const Tube& m : tube.members) validate_tube(m, g, where);
      break;
    case TubeKind::time_window:
      if (tube.t_lo > tube.t_hi) throw ValidationError(where + ": time window has t_lo > t_hi");
      if (tube.d_lo && tube.d_hi && *tube.d_lo > *tube.d_hi) {
        throw ValidationError(where + ": time window has d_lo > d_hi");
      }
      if (tube.members.size() > 1) throw ValidationError(where + ": time window has one inner tube");
      for (const Tube& m : tube.members) validate_tube(m, g, where);
      break;
    case TubeKind::trajectory_singleton:
      if (!tube.trajectory || tube.trajectory->states.empty()) {
        throw ValidationError(where + ": trajectory tube needs a nonempty trajectory");
      }
      if (tube.trajectory->dim != n) {
        throw ValidationError(where + ": trajectory dimension must match the grid");
      }
      if (tube.trajectory->states.size() > 1 && !(tube.trajectory->h > 0.0)) {
        throw ValidationError(where + ": trajectory step must be positive");
      }
      if (!(tube.tolerance >= 0.0)) throw ValidationError(where + ": tolerance must be >= 0");
      break;
  }
}

void validate_dynamics(const DynamicsSpec& dyn, const GridSpec& g) {
  const std::size_t n = g.dim();
  if (dyn.control_samples.empty()) throw ValidationError("control_samples must be nonempty");
  const std::size_t m = dyn.control_samples.front().size();
  for (const auto& u : dyn.control_samples) {
    if (u.size() != m || m == 0) {
      throw ValidationError("control samples must share one nonzero dimension");
    }
    for (double v : u) {
      if (!std::isfinite(v)) throw ValidationError("control samples must be finite");
    }
  }
  switch (dyn.family) {
    case DynamicsFamily::integrator:
    case DynamicsFamily::tabulated:
      if (m != n) throw ValidationError("integrator controls must match the state dimension");
      if (!dyn.velocity_bound.empty()) {
        if (dyn.velocity_bound.size() != n) {
          throw ValidationError("velocity_bound must match the state dimension");
        }
        for (const auto& u : dyn.control_samples) {
          for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(u[i]) > dyn.velocity_bound[i] + kEps) {
              throw ValidationError("control sample exceeds velocity_bound");
            }
          }
        }
      }
      for (const auto& e : dyn.table) {
        if (e.velocities.empty()) throw ValidationError("tabulated cell with no velocities");
        for (const auto& v : e.velocities) {
          for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(v[i])) throw ValidationError("tabulated velocity is not finite");
          }
        }
      }
      break;
    case DynamicsFamily::affine:
      if (dyn.a.size() != n || dyn.b.size() != n || dyn.drift.size() != n) {
        throw ValidationError("affine dynamics need A (n x n), B (n x m) and b (n)");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (dyn.a[i].size() != n || dyn.b[i].size() != m) {
          throw ValidationError("affine dynamics need A (n x n), B (n x m) and b (n)");
        }
      }
      break;
  }
}

}  // namespace

void validate_problem(const ProblemSpec& p, bool require_departure) {
  const GridSpec& g = p.grid;
  GridSpec::make(g.t_axis, g.d_axis, g.x_axes);
  validate_dynamics(p.dynamics, g);
  validate_tube(p.env, g, "env");
  validate_tube(p.departure, g, "departure");

  bool any_departure = false;
  const std::size_t states = g.state_count();
  for (std::size_t t = 0; t < g.t_axis.count; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const StateIndex x = g.state_index(s);
      if (!in_departure(p, t, x)) continue;
      any_departure = true;
      if (!in_env(p, Cell{t, 0, x})) {
        std::ostringstream os;
        os << "departure state at t=" << g.t_axis.value(t) << " lies outside K(t, 0)";
        throw ValidationError(os.str());
      }
    }
  }
  if (require_departure && !any_departure) {
    throw ValidationError("departure tube C(t) is empty at every grid time");
  }
}

// --- JSON ------------------------------------------------------------------

namespace {

Axis axis_from_json(const json& j, const std::string& where) {
  detail::check_keys(j, where, {"lo", "hi", "step"}, {"lo", "hi", "step"});
  return Axis::make(detail::number(j.at("lo"), where + ".lo"), detail::number(j.at("hi"), where + ".hi"),
                    detail::number(j.at("step"), where + ".step"));
}

json axis_to_json(const Axis& a) { return json{{"lo", a.lo}, {"hi", a.hi}, {"step", a.step}}; }

}  // namespace

namespace detail {

Trajectory trajectory_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"t0", "h", "states", "role"}, {"t0", "h", "states"});
  Trajectory tr;
  tr.t0 = number(j.at("t0"), where + ".t0");
  tr.h = number(j.at("h"), where + ".h");
  if (j.contains("role")) tr.role = parse_role(j.at("role").get<std::string>());
  const json& states = j.at("states");
  if (!states.is_array() || states.empty()) throw SchemaError(where + ".states must be a nonempty array");
  tr.dim = 0;
  for (const json& s : states) {
    std::vector<double> v = vector(s, where + ".states");
    if (v.empty() || v.size() > kMaxStateDim) throw SchemaError(where + ".states has a bad dimension");
    if (tr.dim == 0) tr.dim = v.size();
    if (v.size() != tr.dim) throw SchemaError(where + ".states mixes dimensions");
    StateVec x{};
    std::copy(v.begin(), v.end(), x.begin());
    tr.states.push_back(x);
  }
  return tr;
}

json trajectory_to_json(const Trajectory& tr) {
  json states = json::array();
  for (const StateVec& x : tr.states) states.push_back(std::vector<double>(x.begin(), x.begin() + tr.dim));
  return json{{"t0", tr.t0}, {"h", tr.h}, {"states", states}, {"role", role_name(tr.role)}};
}

}  // namespace detail

namespace {

Tube tube_from_json(const json& j, const std::string& where) {
  detail::check_keys(j, where, {"kind", "params"}, {"kind"});
  const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) throw SchemaError(where + ".params must be an object");
  const std::string pw = where + ".params";
  if (kind == "everywhere") {
    detail::check_keys(params, pw, {}, {});
    return Tube::everywhere();
  }
  if (kind == "box") {
    detail::check_keys(params, pw, {"lo", "hi"}, {"lo", "hi"});
    return Tube::box(detail::vector(params.at("lo"), pw + ".lo"), detail::vector(params.at("hi"), pw + ".hi"));
  }
  if (kind == "ball") {
    detail::check_keys(params, pw, {"center", "radius"}, {"center", "radius"});
    return Tube::ball(detail::vector(params.at("center"), pw + ".center"),
                      detail::number(params.at("radius"), pw + ".radius"));
  }
  if (kind == "union") {
    detail::check_keys(params, pw, {"members"}, {"members"});
    if (!params.at("members").is_array()) throw SchemaError(pw + ".members must be an array");
    std::vector<Tube> members;
    for (const json& m : params.at("members")) members.push_back(tube_from_json(m, pw + ".members[]"));
    return Tube::union_of(std::move(members));
  }
  if (kind == "time-window") {
    detail::check_keys(params, pw, {"t_lo", "t_hi", "d_lo", "d_hi", "inner"}, {"t_lo", "t_hi"});
    std::optional<Tube> inner;
    if (params.contains("inner")) inner = tube_from_json(params.at("inner"), pw + ".inner");
    Tube t = Tube::time_window(detail::number(params.at("t_lo"), pw + ".t_lo"),
                               detail::number(params.at("t_hi"), pw + ".t_hi"), std::move(inner));
    if (params.contains("d_lo")) t.d_lo = detail::number(params.at("d_lo"), pw + ".d_lo");
    if (params.contains("d_hi")) t.d_hi = detail::number(params.at("d_hi"), pw + ".d_hi");
    return t;
  }
  if (kind == "trajectory-singleton") {
    detail::check_keys(params, pw, {"trajectory", "tolerance"}, {"trajectory"});
    double tol = 0.5;
    if (params.contains("tolerance")) tol = detail::number(params.at("tolerance"), pw + ".tolerance");
    return Tube::along(detail::trajectory_from_json(params.at("trajectory"), pw + ".trajectory"), tol);
  }
  throw SchemaError(where + ": unknown tube kind '" + kind + "'");
}

json tube_to_json(const Tube& t) {
  switch (t.kind) {
    case TubeKind::everywhere:
      return json{{"kind", "everywhere"}, {"params", json::object()}};
    case TubeKind::box:
      return json{{"kind", "box"}, {"params", {{"lo", t.lo}, {"hi", t.hi}}}};
    case TubeKind::ball:
      return json{{"kind", "ball"}, {"params", {{"center", t.center}, {"radius", t.radius}}}};
    case TubeKind::union_of: {
      json members = json::array();
      for (const Tube& m : t.members) members.push_back(tube_to_json(m));
      return json{{"kind", "union"}, {"params", {{"members", members}}}};
    }
    case TubeKind::time_window: {
      json params{{"t_lo", t.t_lo}, {"t_hi", t.t_hi}};
      if (t.d_lo) params["d_lo"] = *t.d_lo;
      if (t.d_hi) params["d_hi"] = *t.d_hi;
      if (!t.members.empty()) params["inner"] = tube_to_json(t.members.front());
      return json{{"kind", "time-window"}, {"params", params}};
    }
    case TubeKind::trajectory_singleton:
      return json{{"kind", "trajectory-singleton"},
                  {"params", {{"trajectory", detail::trajectory_to_json(*t.trajectory)},
                              {"tolerance", t.tolerance}}}};
  }
  return json{};
}

std::vector<std::vector<double>> matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const json& row : j) out.push_back(detail::vector(row, where));
  return out;
}

DynamicsSpec dynamics_from_json(const json& j, const GridSpec& g) {
  detail::check_keys(j, "dynamics", {"family", "control_samples", "params"}, {"family", "control_samples"});
  DynamicsSpec dyn;
  const std::string family = j.at("family").is_string() ? j.at("family").get<std::string>() : "";
  const json& samples = j.at("control_samples");
  if (!samples.is_array()) throw SchemaError("dynamics.control_samples must be an array");
  for (const json& u : samples) dyn.control_samples.push_back(detail::vector(u, "dynamics.control_samples"));
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) throw SchemaError("dynamics.params must be an object");
  if (family == "integrator") {
    dyn.family = DynamicsFamily::integrator;
    detail::check_keys(params, "dynamics.params", {"velocity_bound"}, {});
    if (params.contains("velocity_bound")) {
      dyn.velocity_bound = detail::vector(params.at("velocity_bound"), "dynamics.params.velocity_bound");
    }
  } else if (family == "affine") {
    dyn.family = DynamicsFamily::affine;
    detail::check_keys(params, "dynamics.params", {"A", "B", "b"}, {"A", "B", "b"});
    dyn.a = matrix(params.at("A"), "dynamics.params.A");
    dyn.b = matrix(params.at("B"), "dynamics.params.B");
    dyn.drift = detail::vector(params.at("b"), "dynamics.params.b");
  } else if (family == "tabulated") {
    dyn.family = DynamicsFamily::tabulated;
    detail::check_keys(params, "dynamics.params", {"cells"}, {});
    if (params.contains("cells")) {
      if (!params.at("cells").is_array()) throw SchemaError("dynamics.params.cells must be an array");
      for (const json& e : params.at("cells")) {
        const std::string w = "dynamics.params.cells[]";
        detail::check_keys(e, w, {"t", "d", "x", "velocities"}, {"t", "d", "x", "velocities"});
        Point pt{detail::number(e.at("t"), w + ".t"), detail::number(e.at("d"), w + ".d"), {}};
        auto xv = detail::vector(e.at("x"), w + ".x");
        if (xv.size() != g.dim()) throw ValidationError(w + ".x must match the state dimension");
        std::copy(xv.begin(), xv.end(), pt.x.begin());
        TabulatedVelocities tv;
        try {
          tv.cell = cell_of(g, pt);
        } catch (const OutOfBounds& ex) {
          throw ValidationError(w + ": " + ex.what());
        }
        if (!e.at("velocities").is_array()) throw SchemaError(w + ".velocities must be an array");
        for (const json& v : e.at("velocities")) {
          auto vv = detail::vector(v, w + ".velocities");
          if (vv.size() != g.dim()) throw ValidationError(w + ".velocities must match the state dimension");
          StateVec sv{};
          std::copy(vv.begin(), vv.end(), sv.begin());
          tv.velocities.push_back(sv);
        }
        dyn.table.push_back(std::move(tv));
      }
      std::sort(dyn.table.begin(), dyn.table.end(),
                [](const auto& a, const auto& b) { return a.cell < b.cell; });
      for (std::size_t i = 1; i < dyn.table.size(); ++i) {
        if (dyn.table[i].cell == dyn.table[i - 1].cell) {
          throw ValidationError("dynamics.params.cells lists a cell twice");
        }
      }
    }
  } else {
    throw SchemaError("dynamics.family must be integrator, affine or tabulated");
  }
  return dyn;
}

json dynamics_to_json(const DynamicsSpec& dyn, const GridSpec& g) {
  json j{{"control_samples", dyn.control_samples}};
  switch (dyn.family) {
    case DynamicsFamily::integrator: {
      j["family"] = "integrator";
      json params = json::object();
      if (!dyn.velocity_bound.empty()) params["velocity_bound"] = dyn.velocity_bound;
      j["params"] = params;
      break;
    }
    case DynamicsFamily::affine:
      j["family"] = "affine";
      j["params"] = json{{"A", dyn.a}, {"B", dyn.b}, {"b", dyn.drift}};
      break;
    case DynamicsFamily::tabulated: {
      j["family"] = "tabulated";
      json cells = json::array();
      for (const auto& e : dyn.table) {
        const Point pt = point_of(g, e.cell);
        json vels = json::array();
        for (const auto& v : e.velocities) vels.push_back(std::vector<double>(v.begin(), v.begin() + g.dim()));
        cells.push_back(json{{"t", pt.t}, {"d", pt.d},
                             {"x", std::vector<double>(pt.x.begin(), pt.x.begin() + g.dim())},
                             {"velocities", vels}});
      }
      j["params"] = json{{"cells", cells}};
      break;
    }
  }
  return j;
}

}  // namespace

namespace detail {

GridSpec grid_from_json(const json& j) {
  check_keys(j, "grid", {"t", "d", "x"}, {"t", "d", "x"});
  std::vector<Axis> xs;
  const json& x = j.at("x");
  if (x.is_object()) {
    xs.push_back(axis_from_json(x, "grid.x"));
  } else if (x.is_array()) {
    for (const json& a : x) xs.push_back(axis_from_json(a, "grid.x[]"));
  } else {
    throw SchemaError("grid.x must be an axis or a list of axes");
  }
  return GridSpec::make(axis_from_json(j.at("t"), "grid.t"), axis_from_json(j.at("d"), "grid.d"), std::move(xs));
}

json grid_to_json(const GridSpec& g) {
  json xs = json::array();
  for (const Axis& a : g.x_axes) xs.push_back(axis_to_json(a));
  return json{{"t", axis_to_json(g.t_axis)}, {"d", axis_to_json(g.d_axis)}, {"x", xs}};
}

ProblemSpec problem_from_json(const json& j) {
  check_keys(j, "problem", {"grid", "dynamics", "env", "departure"}, {"grid", "dynamics", "env", "departure"});
  ProblemSpec p{grid_from_json(j.at("grid")), {}, {}, {}};
  p.dynamics = dynamics_from_json(j.at("dynamics"), p.grid);
  p.env = tube_from_json(j.at("env"), "env");
  p.departure = tube_from_json(j.at("departure"), "departure");
  validate_problem(p);
  return p;
}

json problem_to_json(const ProblemSpec& p) {
  return json{{"grid", grid_to_json(p.grid)},
              {"dynamics", dynamics_to_json(p.dynamics, p.grid)},
              {"env", tube_to_json(p.env)},
              {"departure", tube_to_json(p.departure)}};
}

}  // namespace detail

ProblemSpec parse_problem(std::string_view text) {
  return detail::problem_from_json(detail::parse_json(text, "problem"));
}

ProblemSpec load_problem(const std::string& path) { return parse_problem(detail::read_file(path)); }

std::string serialize_problem(const ProblemSpec& p) { return detail::problem_to_json(p).dump(2) + "\n"; }

std::string unit_integrator_document() {
  return R"({
  "grid": {
    "t": {"lo": 0, "hi": 4, "step": 0.25},
    "d": {"lo": 0, "hi": 4, "step": 0.25},
    "x": [{"lo": -2, "hi": 2, "step": 0.25}]
  },
  "dynamics": {"family": "integrator", "control_samples": [[-1], [0], [1]],
               "params": {"velocity_bound": [1]}},
  "env": {"kind": "everywhere"},
  "departure": {"kind": "ball", "params": {"center": [0], "radius": 0}}
}
)";
}

ProblemSpec unit_integrator_problem() { return parse_problem(unit_integrator_document()); }

}  // namespace cournot
