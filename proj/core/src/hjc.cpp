#include "cournot/hjc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cournot/error.hpp"
#include "cournot/format.hpp"
#include "cournot/parallel.hpp"
#include "json_io.hpp"

namespace cournot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRoundEps = 1e-9;

/// Lattice increments of y for h * l, rounded up; nullopt for l = +inf.
std::optional<std::size_t> y_increment(double cost, double ystep) {
  if (!std::isfinite(cost)) return std::nullopt;
  const double q = std::ceil(cost / ystep - kRoundEps);
  return static_cast<std::size_t>(std::max(0.0, q));
}

}  // namespace

// --- costs -------------------------------------------------------------------

double departure_cost(const ProblemSpec& p, const CostSpec& costs, std::size_t t, const StateIndex& s) {
  const DepartureCost& c = costs.departure;
  switch (c.family) {
    case DepartureCostFamily::zero_on_departure:
      return in_departure(p, t, s) ? 0.0 : kInf;
    case DepartureCostFamily::quadratic: {
      if (!in_departure(p, t, s)) return kInf;
      const StateVec x = p.grid.state_point(s);
      double q = 0.0;
      for (std::size_t i = 0; i < p.grid.dim(); ++i) {
        const double ci = i < c.center.size() ? c.center[i] : 0.0;
        q += (x[i] - ci) * (x[i] - ci);
      }
      return c.weight * q;
    }
    case DepartureCostFamily::tabulated: {
      double best = kInf;
      for (const TabulatedCost& e : c.table) {
        auto ti = p.grid.t_axis.try_index(e.t);
        auto si = p.grid.try_state_index(e.s);
        if (ti && si && *ti == t && *si == s) best = std::min(best, e.value);
      }
      return best;
    }
  }
  return kInf;
}

double lagrangian(const CostSpec& costs, const ControlSample& u) {
  const Lagrangian& l = costs.lagrangian;
  double n2 = 0.0;
  for (double v : u.u) n2 += v * v;
  switch (l.family) {
    case LagrangianFamily::constant: return l.value;
    case LagrangianFamily::norm: return l.weight * std::sqrt(n2);
    case LagrangianFamily::quadratic: return l.weight * n2;
    case LagrangianFamily::tabulated: return u.index < l.per_control.size() ? l.per_control[u.index] : kInf;
  }
  return kInf;
}

void validate_costs(const ProblemSpec& p, const CostSpec& costs) {
  const Lagrangian& l = costs.lagrangian;
  switch (l.family) {
    case LagrangianFamily::constant:
      if (!std::isfinite(l.value) || l.value < 0.0) {
        throw ValidationError("Lagrangian must be finite and non-negative (constant value)");
      }
      break;
    case LagrangianFamily::norm:
    case LagrangianFamily::quadratic:
      if (!std::isfinite(l.weight) || l.weight < 0.0) {
        throw ValidationError("Lagrangian must be non-negative (weight < 0)");
      }
      break;
    case LagrangianFamily::tabulated: {
      if (p.dynamics.family == DynamicsFamily::tabulated) {
        throw ValidationError("a tabulated Lagrangian needs sample-based dynamics");
      }
      if (l.per_control.size() != p.dynamics.control_samples.size()) {
        throw ValidationError("tabulated Lagrangian needs one value per control sample");
      }
      bool any_finite = false;
      for (double v : l.per_control) {
        if (v < 0.0) throw ValidationError("Lagrangian must be non-negative (tabulated value < 0)");
        any_finite = any_finite || std::isfinite(v);
      }
      if (!any_finite) throw ValidationError("tabulated Lagrangian leaves no admissible control");
      break;
    }
  }
  const DepartureCost& c = costs.departure;
  if (c.family == DepartureCostFamily::quadratic) {
    if (!c.center.empty() && c.center.size() != p.grid.dim()) {
      throw ValidationError("quadratic departure cost center must match the state dimension");
    }
    if (!std::isfinite(c.weight)) throw ValidationError("quadratic departure cost weight must be finite");
  }
  if (c.family == DepartureCostFamily::tabulated) {
    for (const TabulatedCost& e : c.table) {
      if (!p.grid.t_axis.try_index(e.t) || !p.grid.try_state_index(e.s)) {
        throw ValidationError("tabulated departure cost entry lies off the grid");
      }
      if (std::isnan(e.value) || e.value == -kInf) throw ValidationError("departure cost must be finite or +inf");
    }
  }
  validate_problem(induced_problem(p, costs), false);
}

ProblemSpec induced_problem(const ProblemSpec& p, const CostSpec& costs) {
  ProblemSpec q = p;
  if (costs.departure.family == DepartureCostFamily::tabulated) {
    std::vector<Tube> points;
    for (const TabulatedCost& e : costs.departure.table) {
      if (!std::isfinite(e.value)) continue;
      std::vector<double> centre(e.s.begin(), e.s.begin() + p.grid.dim());
      points.push_back(Tube::time_window(e.t, e.t, Tube::ball(std::move(centre), 0.0)));
    }
    q.departure = Tube::union_of(std::move(points));
  }
  if (costs.lagrangian.family == LagrangianFamily::tabulated) {
    q.dynamics.control_samples.clear();
    for (std::size_t k = 0; k < p.dynamics.control_samples.size(); ++k) {
      if (k < costs.lagrangian.per_control.size() && std::isfinite(costs.lagrangian.per_control[k])) {
        q.dynamics.control_samples.push_back(p.dynamics.control_samples[k]);
      }
    }
  }
  return q;
}

// --- value functions ---------------------------------------------------------

ValueField cost_to_arrive(const ProblemSpec& p, const StepRule& r, const CostSpec& costs) {
  validate_rule(p, r);
  validate_costs(p, costs);
  const GridSpec& grid = p.grid;
  const std::size_t nt = grid.t_axis.count;
  const std::size_t nd = grid.d_axis.count;
  const std::size_t states = grid.state_count();
  const CellSet env = env_cells(p);

  ValueField vf;
  vf.grid = grid;
  vf.g.assign(grid.cell_count(), kInf);
  vf.v.assign(nt * states, kInf);
  vf.w.assign(nt * states, kInf);
  vf.y_overflow = CellSet::over_time_states(grid);

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t f = grid.flat(t, 0, s);
      if (!env.test(f)) continue;
      vf.g[f] = departure_cost(p, costs, t, grid.state_index(s));
    }
  }

  for (std::size_t k = 1; k < nd && k < nt; ++k) {
    parallel_for(nt - k, [&](std::size_t i) {
      const std::size_t t = k + i;
      const std::size_t prev = grid.flat(t - 1, k - 1, 0);
      const std::size_t here = grid.flat(t, k, 0);
      for (std::size_t s = 0; s < states; ++s) {
        const double base = vf.g[prev + s];
        if (!std::isfinite(base)) continue;
        const Cell src{t - 1, k - 1, grid.state_index(s)};
        const auto controls = controls_at(p, src);
        for (const ControlStep& step : control_steps(p, r, src)) {
          const double l = lagrangian(costs, controls[step.control]);
          if (!std::isfinite(l)) continue;
          const double cand = base + r.h * l;
          for (std::size_t target : step.states) {
            if (!env.test(here + target)) continue;
            double& slot = vf.g[here + target];
            slot = std::min(slot, cand);
          }
        }
      }
    });
  }

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t d = 0; d < nd && d <= t; ++d) {
      for (std::size_t s = 0; s < states; ++s) {
        double& v = vf.v[t * states + s];
        v = std::min(v, vf.g[grid.flat(t, d, s)]);
      }
    }
  }
  return vf;
}

namespace {

struct EpigraphSlice {
  std::vector<std::uint8_t> bits;  // states * ny
  std::vector<std::uint8_t> lost;  // states: a step into the cell left the y axis
};

}  // namespace

void epigraph_solution(const ProblemSpec& p, const StepRule& r, const CostSpec& costs, const Axis& y_axis,
                       ValueField& vf) {
  validate_rule(p, r);
  validate_costs(p, costs);
  const GridSpec& grid = p.grid;
  if (!(vf.grid == grid)) throw ValidationError("value field grid does not match the problem");
  const std::size_t nt = grid.t_axis.count;
  const std::size_t nd = grid.d_axis.count;
  const std::size_t states = grid.state_count();
  const std::size_t ny = y_axis.count;
  const CellSet env = env_cells(p);

  std::vector<std::size_t> shape = CellSet::over_cells(grid).shape();
  shape.push_back(ny);
  CellSet epi(std::move(shape));
  // Cells of K that some evolution reaches only above the y axis. Set cells
  // of epi are never lost: a value past the axis cannot lower their W.
  CellSet lost = CellSet::over_cells(grid);

  auto lowest_y = [&](std::size_t cell) -> std::optional<std::size_t> {
    std::optional<std::size_t> y;
    epi.for_each_in(cell * ny, (cell + 1) * ny, [&](std::size_t bit) {
      if (!y) y = bit - cell * ny;
    });
    return y;
  };

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const std::size_t f = grid.flat(t, 0, s);
      if (!env.test(f)) continue;
      const double c = departure_cost(p, costs, t, grid.state_index(s));
      if (!std::isfinite(c)) continue;
      const double q = std::ceil((c - y_axis.lo) / y_axis.step - kRoundEps);
      const std::size_t lowest = q <= 0.0 ? 0 : static_cast<std::size_t>(q);
      if (lowest >= ny) {
        lost.set(f);
        continue;
      }
      for (std::size_t y = lowest; y < ny; ++y) epi.set(f * ny + y);
    }
  }

  for (std::size_t k = 1; k < nd && k < nt; ++k) {
    std::vector<EpigraphSlice> slices(nt - k);
    parallel_for(nt - k, [&](std::size_t i) {
      const std::size_t t = k + i;
      EpigraphSlice& out = slices[i];
      out.bits.assign(states * ny, 0);
      out.lost.assign(states, 0);
      const std::size_t prev = grid.flat(t - 1, k - 1, 0);
      const std::size_t here = grid.flat(t, k, 0);
      for (std::size_t s = 0; s < states; ++s) {
        // Upward closure: the lowest set y of the source dominates the rest.
        const std::optional<std::size_t> y = lowest_y(prev + s);
        const bool source_lost = lost.test(prev + s);
        if (!y && !source_lost) continue;
        const Cell src{t - 1, k - 1, grid.state_index(s)};
        const auto controls = controls_at(p, src);
        for (const ControlStep& step : control_steps(p, r, src)) {
          auto inc = y_increment(r.h * lagrangian(costs, controls[step.control]), y_axis.step);
          if (!inc) continue;
          const std::size_t lifted = y ? *y + *inc : ny;
          for (std::size_t target : step.states) {
            if (!env.test(here + target)) continue;
            if (lifted >= ny) {
              out.lost[target] = 1;
              continue;
            }
            for (std::size_t yy = lifted; yy < ny; ++yy) {
              auto& b = out.bits[target * ny + yy];
              if (b) break;
              b = 1;
            }
          }
        }
      }
    });
    for (std::size_t i = 0; i < slices.size(); ++i) {
      const std::size_t here = grid.flat(k + i, k, 0);
      for (std::size_t s = 0; s < states; ++s) {
        bool any = false;
        for (std::size_t y = 0; y < ny; ++y) {
          if (slices[i].bits[s * ny + y]) {
            epi.set((here + s) * ny + y);
            any = true;
          }
        }
        if (slices[i].lost[s] && !any) lost.set(here + s);
      }
    }
  }

  vf.w.assign(nt * states, kInf);
  CellSet overflow = CellSet::over_time_states(grid);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t d = 0; d < nd && d <= t; ++d) {
      for (std::size_t s = 0; s < states; ++s) {
        const std::size_t f = grid.flat(t, d, s);
        if (auto y = lowest_y(f)) {
          double& w = vf.w[t * states + s];
          w = std::min(w, y_axis.value(*y));
        }
        if (lost.test(f)) overflow.set(t * states + s);
      }
    }
    // A window lost above the axis only matters where no window stays below it.
    for (std::size_t s = 0; s < states; ++s) {
      if (std::isfinite(vf.w[t * states + s])) overflow.reset(t * states + s);
    }
  }
  vf.y_axis = y_axis;
  vf.y_overflow = std::move(overflow);
  vf.status = vf.y_overflow.none() ? ValueStatus::ok : ValueStatus::y_range_exceeded;
}

ValueField epigraph_solution(const ProblemSpec& p, const StepRule& r, const CostSpec& costs,
                             const Axis& y_axis) {
  ValueField vf = cost_to_arrive(p, r, costs);
  epigraph_solution(p, r, costs, y_axis, vf);
  return vf;
}

CoincidenceStats coincidence_report(const ValueField& vf) {
  CoincidenceStats st;
  const std::size_t states = vf.grid.state_count();
  double sum = 0.0;
  for (std::size_t i = 0; i < vf.v.size(); ++i) {
    const bool fv = std::isfinite(vf.v[i]);
    const bool fw = i < vf.w.size() && std::isfinite(vf.w[i]);
    if (fv && fw) {
      const double diff = std::abs(vf.v[i] - vf.w[i]);
      st.max_abs = std::max(st.max_abs, diff);
      sum += diff;
      ++st.compared;
    } else if (fv != fw) {
      st.mismatches.emplace_back(i / states, i % states);
    }
  }
  if (st.compared > 0) st.mean_abs = sum / static_cast<double>(st.compared);
  return st;
}

std::string export_value_csv(const ValueField& vf) {
  const GridSpec& grid = vf.grid;
  const std::size_t states = grid.state_count();
  std::string out;
  for (std::size_t t = 0; t < grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      out += format_real(grid.t_axis.value(t));
      out += ',';
      append_state(out, grid.state_point(s), grid.dim());
      out += ',';
      out += format_real(vf.V(t, s));
      out += ',';
      out += format_real(vf.W(t, s));
      out += '\n';
    }
  }
  return out;
}

// --- documents -----------------------------------------------------------------

CostSpec parse_costs(std::string_view text) {
  using nlohmann::json;
  const json j = detail::parse_json(text, "costs");
  detail::check_keys(j, "costs", {"departure", "lagrangian"}, {"departure", "lagrangian"});
  CostSpec cs;

  const json& dep = j.at("departure");
  detail::check_keys(dep, "costs.departure", {"family", "params"}, {"family"});
  const json dparams = dep.contains("params") ? dep.at("params") : json::object();
  const std::string dfam = dep.at("family").is_string() ? dep.at("family").get<std::string>() : "";
  if (dfam == "zero-on-C") {
    detail::check_keys(dparams, "costs.departure.params", {}, {});
    cs.departure.family = DepartureCostFamily::zero_on_departure;
  } else if (dfam == "quadratic-in-s") {
    detail::check_keys(dparams, "costs.departure.params", {"center", "weight"}, {});
    cs.departure.family = DepartureCostFamily::quadratic;
    if (dparams.contains("center")) cs.departure.center = detail::vector(dparams.at("center"), "center");
    if (dparams.contains("weight")) cs.departure.weight = detail::number(dparams.at("weight"), "weight");
  } else if (dfam == "tabulated") {
    detail::check_keys(dparams, "costs.departure.params", {"entries"}, {"entries"});
    cs.departure.family = DepartureCostFamily::tabulated;
    if (!dparams.at("entries").is_array()) throw SchemaError("costs.departure.params.entries must be an array");
    for (const json& e : dparams.at("entries")) {
      detail::check_keys(e, "costs.departure.params.entries[]", {"t", "s", "value"}, {"t", "s", "value"});
      TabulatedCost tc;
      tc.t = detail::number(e.at("t"), "entries[].t");
      auto s = detail::vector(e.at("s"), "entries[].s");
      if (s.empty() || s.size() > kMaxStateDim) throw SchemaError("entries[].s has a bad dimension");
      std::copy(s.begin(), s.end(), tc.s.begin());
      tc.value = detail::number_or_inf(e.at("value"), "entries[].value");
      cs.departure.table.push_back(tc);
    }
  } else {
    throw SchemaError("costs.departure.family must be zero-on-C, tabulated or quadratic-in-s");
  }

  const json& lag = j.at("lagrangian");
  detail::check_keys(lag, "costs.lagrangian", {"family", "params"}, {"family"});
  const json lparams = lag.contains("params") ? lag.at("params") : json::object();
  const std::string lfam = lag.at("family").is_string() ? lag.at("family").get<std::string>() : "";
  if (lfam == "constant") {
    detail::check_keys(lparams, "costs.lagrangian.params", {"value"}, {});
    cs.lagrangian.family = LagrangianFamily::constant;
    if (lparams.contains("value")) cs.lagrangian.value = detail::number_or_inf(lparams.at("value"), "value");
  } else if (lfam == "norm-of-u" || lfam == "quadratic") {
    detail::check_keys(lparams, "costs.lagrangian.params", {"weight"}, {});
    cs.lagrangian.family = lfam == "quadratic" ? LagrangianFamily::quadratic : LagrangianFamily::norm;
    if (lparams.contains("weight")) cs.lagrangian.weight = detail::number(lparams.at("weight"), "weight");
  } else if (lfam == "tabulated") {
    detail::check_keys(lparams, "costs.lagrangian.params", {"values"}, {"values"});
    cs.lagrangian.family = LagrangianFamily::tabulated;
    if (!lparams.at("values").is_array()) throw SchemaError("costs.lagrangian.params.values must be an array");
    for (const json& v : lparams.at("values")) cs.lagrangian.per_control.push_back(detail::number_or_inf(v, "values[]"));
  } else {
    throw SchemaError("costs.lagrangian.family must be constant, norm-of-u, quadratic or tabulated");
  }
  return cs;
}

CostSpec load_costs(const std::string& path) { return parse_costs(detail::read_file(path)); }

}  // namespace cournot
