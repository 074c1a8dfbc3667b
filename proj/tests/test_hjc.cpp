#include "doctest.h"

#include <cmath>

#include "cournot/cournot_map.hpp"
#include "cournot/error.hpp"
#include "cournot/hjc.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace cournot;
using support::x1;

namespace {

CostSpec unit_costs() { return load_costs(support::fixture("costs_unit.json")); }
CostSpec norm_costs() { return load_costs(support::fixture("costs_norm.json")); }

Axis y_axis(double hi, double step) { return Axis::make(0, hi, step); }

std::size_t sx(const ProblemSpec& p, double x) { return p.grid.state_flat(p.grid.state_index_of(x1(x))); }

/// V from the oracle: min over durations of Dijkstra chain costs.
std::vector<double> oracle_v(const ProblemSpec& p, const CostSpec& c) {
  const auto best = oracle::costs(
      p, 0, [&](std::size_t t, std::size_t s) { return departure_cost(p, c, t, p.grid.state_index(s)); },
      [&](std::size_t k) {
        ControlSample u;
        u.index = k;
        u.u = p.dynamics.control_samples[k];
        return lagrangian(c, u);
      });
  const GridSpec& g = p.grid;
  std::vector<double> v(g.t_axis.count * g.state_count(), INFINITY);
  for (std::size_t t = 0; t < g.t_axis.count; ++t) {
    for (std::size_t d = 0; d < g.d_axis.count; ++d) {
      for (std::size_t s = 0; s < g.state_count(); ++s) {
        v[t * g.state_count() + s] = std::min(v[t * g.state_count() + s], best[oracle::index(p, t, d, s)]);
      }
    }
  }
  return v;
}

}  // namespace

TEST_CASE("unit Lagrangian: value is the aperture") {
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  const ValueField vf = cost_to_arrive(p, r, unit_costs());
  CHECK(vf.V(16, sx(p, 1.0)) == 1.0);
  const ApertureField a = aperture(capture_basin(p, r));
  for (std::size_t t = 0; t < p.grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < p.grid.state_count(); ++s) REQUIRE(vf.V(t, s) == a.value(t, s));
  }
}

TEST_CASE("norm Lagrangian: value is the distance travelled") {
  const ProblemSpec p = unit_integrator_problem();
  const ValueField vf = cost_to_arrive(p, step_rule(p), norm_costs());
  CHECK(vf.V(16, sx(p, 1.0)) == 1.0);
  CHECK(vf.V(16, sx(p, -1.75)) == 1.75);
  CHECK(std::isinf(vf.V(2, sx(p, 1.0))));
  CHECK(vf.v == oracle_v(p, norm_costs()));
}

TEST_CASE("dynamic programming equals the Dijkstra oracle on other costs") {
  ProblemSpec p = unit_integrator_problem();
  p.departure = Tube::box({-0.5}, {0.5});
  const CostSpec quad = parse_costs(R"({"departure": {"family": "quadratic-in-s", "params": {"center": [0.25], "weight": 2}},
      "lagrangian": {"family": "quadratic", "params": {"weight": 3}}})");
  CHECK(cost_to_arrive(p, step_rule(p), quad).v == oracle_v(p, quad));
  const CostSpec tab = parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "tabulated", "params": {"values": [1, "inf", 0.5]}}})");
  CHECK(cost_to_arrive(p, step_rule(p), tab).v == oracle_v(p, tab));
}

TEST_CASE("finite domain of V is the arrival tube of the induced problem") {
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  const CostSpec tab = parse_costs(R"({"departure": {"family": "tabulated", "params": {"entries": [
      {"t": 0.5, "s": [0.5], "value": 2}, {"t": 1, "s": [-1], "value": 0}, {"t": 2, "s": [0], "value": "inf"}]}},
      "lagrangian": {"family": "tabulated", "params": {"values": [1, "inf", 1]}}})");
  const ProblemSpec induced = induced_problem(p, tab);
  CHECK(induced.dynamics.control_samples.size() == 2);
  const CellSet tube = arrival_tube(capture_basin(induced, step_rule(induced)));
  const ValueField vf = cost_to_arrive(p, r, tab);
  for (std::size_t i = 0; i < vf.v.size(); ++i) REQUIRE(std::isfinite(vf.v[i]) == tube.test(i));
  CHECK(vf.V(2, sx(p, 0.5)) == 2.0);
  CHECK(std::isfinite(vf.V(8, sx(p, 0))));
  CHECK(std::isinf(vf.V(8, sx(p, 0.25))));
}

TEST_CASE("V is below G in every duration layer") {
  const ProblemSpec p = unit_integrator_problem();
  const ValueField vf = cost_to_arrive(p, step_rule(p), norm_costs());
  for (std::size_t f = 0; f < p.grid.cell_count(); ++f) {
    const Cell c = p.grid.cell(f);
    REQUIRE(vf.V(c.t, p.grid.state_flat(c.x)) <= vf.g[f]);
  }
}

TEST_CASE("epigraph solution matches V") {
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  for (const CostSpec& c : {unit_costs(), norm_costs()}) {
    const ValueField vf = epigraph_solution(p, r, c, y_axis(4, 0.25));
    CHECK(vf.status == ValueStatus::ok);
    CHECK(vf.W(16, sx(p, 1.0)) == 1.0);
    for (double T = 0; T <= 4; T += 0.25) CHECK(vf.W(p.grid.t_axis.index(T), sx(p, 0)) == 0.0);
    const CoincidenceStats st = coincidence_report(vf);
    CHECK(st.mismatches.empty());
    CHECK(st.max_abs <= 0.25);
    CHECK(st.compared == 217);
  }
}

TEST_CASE("short y axis is reported") {
  const ProblemSpec p = unit_integrator_problem();
  const ValueField vf = epigraph_solution(p, step_rule(p), unit_costs(), y_axis(0.5, 0.25));
  CHECK(vf.status == ValueStatus::y_range_exceeded);
  const std::size_t S = p.grid.state_count();
  for (std::size_t i = 0; i < vf.v.size(); ++i) {
    CAPTURE(i);
    REQUIRE(vf.y_overflow.test(i) == (vf.v[i] > 0.5 && std::isfinite(vf.v[i])));
    if (vf.v[i] <= 0.5) REQUIRE(vf.w[i] == vf.v[i]);
  }
  CHECK(vf.y_overflow.test(16 * S + sx(p, 1.0)));
}

TEST_CASE("coarse y lattice rounds every step up") {
  const ProblemSpec p = unit_integrator_problem();
  const ValueField vf = epigraph_solution(p, step_rule(p), unit_costs(), y_axis(20, 1.0));
  CHECK(vf.status == ValueStatus::ok);
  const CoincidenceStats st = coincidence_report(vf);
  CHECK(st.mismatches.empty());
  // Each of the aperture / h steps rounds h up to one y unit.
  const ApertureField a = aperture(capture_basin(p, step_rule(p)));
  double gap = 0.0;
  for (std::size_t t = 0; t < p.grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < p.grid.state_count(); ++s) {
      if (!a.finite(t, s)) continue;
      REQUIRE(vf.W(t, s) >= vf.V(t, s));
      REQUIRE(vf.W(t, s) == static_cast<double>(a.at(t, s)));
      gap = std::max(gap, vf.W(t, s) - vf.V(t, s));
    }
  }
  CHECK(vf.W(16, sx(p, 1.0)) == 4.0);
  CHECK(st.max_abs == gap);
  CHECK(gap == 6.0);
}

TEST_CASE("empty departure gives empty statistics") {
  ProblemSpec p = unit_integrator_problem();
  p.departure = Tube::time_window(9, 10);
  const ValueField vf = epigraph_solution(p, step_rule(p), unit_costs(), y_axis(4, 0.25));
  const CoincidenceStats st = coincidence_report(vf);
  CHECK(st.compared == 0);
  CHECK(st.mismatches.empty());
  CHECK(st.max_abs == 0.0);
}

TEST_CASE("raising the Lagrangian never lowers V or W") {
  const ProblemSpec p = unit_integrator_problem();
  const StepRule r = step_rule(p);
  const ValueField lo = epigraph_solution(p, r, norm_costs(), y_axis(8, 0.25));
  const CostSpec heavier = parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "norm-of-u", "params": {"weight": 2}}})");
  const ValueField hi = epigraph_solution(p, r, heavier, y_axis(8, 0.25));
  for (std::size_t i = 0; i < lo.v.size(); ++i) {
    REQUIRE(hi.v[i] >= lo.v[i]);
    REQUIRE(hi.w[i] >= lo.w[i]);
  }
}

TEST_CASE("cost document validation") {
  const ProblemSpec p = unit_integrator_problem();
  CHECK_THROWS_AS(validate_costs(p, parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "constant", "params": {"value": -1}}})")),
                  ValidationError);
  CHECK_THROWS_AS(validate_costs(p, parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "tabulated", "params": {"values": [1, 2]}}})")),
                  ValidationError);
  CHECK_THROWS_AS(validate_costs(p, parse_costs(R"({"departure": {"family": "tabulated", "params": {"entries": [
      {"t": 0, "s": [9], "value": 1}]}}, "lagrangian": {"family": "constant"}})")),
                  ValidationError);
  CHECK_THROWS_AS(parse_costs(R"({"departure": {"family": "zero-on-C"}})"), SchemaError);
  CHECK_THROWS_AS(parse_costs(R"({"departure": {"family": "free"}, "lagrangian": {"family": "constant"}})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_costs(R"({"departure": {"family": "zero-on-C"}, "lagrangian": {"family": "constant",
      "params": {"value": 1, "slope": 2}}})"),
                  SchemaError);
  CHECK_THROWS_AS(cost_to_arrive(p, step_rule(p), parse_costs(R"({"departure": {"family": "zero-on-C"},
      "lagrangian": {"family": "norm-of-u", "params": {"weight": -0.5}}})")),
                  ValidationError);
}

TEST_CASE("value export") {
  const ProblemSpec p = unit_integrator_problem();
  const ValueField vf = epigraph_solution(p, step_rule(p), unit_costs(), y_axis(4, 0.25));
  const std::string csv = export_value_csv(vf);
  CHECK(csv.find("4,1,1,1\n") != std::string::npos);
  CHECK(csv.find("0,1,inf,inf\n") != std::string::npos);
  CHECK(csv.rfind("0,-2,inf,inf\n", 0) == 0);
}
