#include "doctest.h"

#include <cmath>

#include "cournot/cournot_map.hpp"
#include "cournot/error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace cournot;
using support::cell1;
using support::x1;

namespace {

struct P1 {
  ProblemSpec p = unit_integrator_problem();
  StepRule r = step_rule(p);
  CournotGraph g = capture_basin(p, r);
  ApertureField a = aperture(g);

  std::size_t s(double x) const { return p.grid.state_flat(p.grid.state_index_of(x1(x))); }
  std::size_t t(double tv) const { return p.grid.t_axis.index(tv); }
};

std::vector<double> members(const GridSpec& g, const CellSet& states) {
  std::vector<double> out;
  states.for_each([&](std::size_t s) { out.push_back(g.state_point(s)[0]); });
  return out;
}

}  // namespace

TEST_CASE("aperture of the unit integrator") {
  const P1 f;
  CHECK(f.a.value(f.t(4), f.s(1.0)) == 1.0);
  CHECK(f.a.value_at(4.0, x1(-1.75)) == 1.75);
  for (double T = 0; T <= 4; T += 0.25) CHECK(f.a.value(f.t(T), f.s(0)) == 0.0);
  CHECK(std::isinf(f.a.value(f.t(0.5), f.s(1.0))));
  CHECK(std::isinf(f.a.value_at(9.0, x1(0))));
}

TEST_CASE("aperture matches the oracle's minimal window") {
  const P1 f;
  const auto want = oracle::apertures(f.p, oracle::bfs(f.p, 0));
  for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(f.a.index[i] == want[i]);
}

TEST_CASE("liquidity is the reciprocal aperture") {
  const P1 f;
  CHECK(f.a.liquidity(f.t(4), f.s(1.0)) == 1.0);
  CHECK(f.a.liquidity(f.t(4), f.s(0.5)) == 2.0);
  CHECK(std::isinf(f.a.liquidity(f.t(4), f.s(0))));
  CHECK(f.a.liquidity(f.t(0.5), f.s(1.0)) == 0.0);
  const std::string csv = export_aperture_csv(f.a, true);
  CHECK(csv.find("4,1,1,1\n") != std::string::npos);
  CHECK(csv.find("4,0,0,inf\n") != std::string::npos);
  CHECK(csv.find("0,2,inf,0\n") != std::string::npos);
}

TEST_CASE("aperture consistency with the graph") {
  const P1 f;
  f.g.cells.for_each([&](std::size_t i) {
    const Cell c = f.p.grid.cell(i);
    REQUIRE(c.d >= f.a.at(c.t, f.p.grid.state_flat(c.x)));
  });
}

TEST_CASE("arrival tube") {
  const P1 f;
  const CellSet tube = arrival_tube(f.g);
  std::vector<double> want;
  for (int i = -4; i <= 4; ++i) want.push_back(0.25 * i);
  CHECK(members(f.p.grid, arrival_at(f.g, f.t(1.0))) == want);
  CHECK(members(f.p.grid, arrival_at(f.g, 0)) == std::vector<double>{0.0});
  for (std::size_t t = 0; t < f.p.grid.t_axis.count; ++t) {
    for (std::size_t s = 0; s < f.p.grid.state_count(); ++s) {
      REQUIRE(tube.test(t * f.p.grid.state_count() + s) == f.a.finite(t, s));
    }
  }
  CHECK(export_arrival_csv(f.p.grid, tube).rfind("0,0\n0.25,-0.25\n", 0) == 0);
}

TEST_CASE("empty graph has an empty arrival tube") {
  ProblemSpec p = unit_integrator_problem();
  p.departure = Tube::time_window(9, 10);
  const CournotGraph g = capture_basin(p, step_rule(p));
  CHECK(arrival_tube(g).none());
  const ApertureField a = aperture(g);
  for (std::size_t i = 0; i < a.index.size(); ++i) REQUIRE(a.index[i] == a.infinite());
}

TEST_CASE("starting states") {
  const P1 f;
  CHECK(members(f.p.grid, starting_states(f.p, f.r, f.g, 1.0, x1(0.5), 0.5)) == std::vector<double>{0.0});
  CHECK_THROWS_AS(starting_states(f.p, f.r, f.g, 1.0, x1(1.0), 0.5), NotInGraph);
  CHECK_THROWS_AS(starting_states(f.p, f.r, f.g, 1.0, x1(0.5), 0.25), NotInGraph);
  CHECK_THROWS_AS(starting_states(f.p, f.r, f.g, 1.0, x1(7.0), 0.5), NotInGraph);
}

TEST_CASE("starting states over an enlarged departure set") {
  const ProblemSpec p = with_departure(unit_integrator_problem(), Tube::box({-0.25}, {0.25}));
  const StepRule r = step_rule(p);
  const CournotGraph g = capture_basin(p, r);
  const auto got = members(p.grid, starting_states(p, r, g, 1.0, x1(0.5), 0.5));
  const Cell target = cell1(p.grid, 1.0, 0.5, 0.5);
  std::vector<double> want;
  for (std::size_t s : oracle::starts(p, 0, oracle::bfs(p, 0), target.t, target.d, p.grid.state_flat(target.x))) {
    want.push_back(p.grid.state_point(s)[0]);
  }
  CHECK(got == want);
  CHECK(got == std::vector<double>{0.0, 0.25});
}

TEST_CASE("earliest starting map") {
  const P1 f;
  const EarliestStart e = earliest_starting(f.p, f.r, f.g, 4, x1(1.0));
  CHECK(e.omega == 1.0);
  CHECK(members(f.p.grid, e.states) == std::vector<double>{0.0});
  const EarliestStart z = earliest_starting(f.p, f.r, f.g, 2, x1(0));
  CHECK(z.omega == 0.0);
  CHECK(members(f.p.grid, z.states) == std::vector<double>{0.0});
  CHECK_THROWS_AS(earliest_starting(f.p, f.r, f.g, 0.5, x1(1.0)), NotInGraph);
}

TEST_CASE("backtrack and start labels") {
  const P1 f;
  const Cell c = cell1(f.p.grid, 3.0, 1.5, -0.5);
  const auto chain = backtrack(f.p, f.r, f.g, c);
  REQUIRE(chain.size() == 7);
  CHECK(chain.front().d == 0);
  CHECK(chain.back() == c);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const auto next = successors(f.p, f.r, chain[i]);
    REQUIRE(std::find(next.begin(), next.end(), chain[i + 1]) != next.end());
    REQUIRE(f.g.contains(chain[i]));
  }
  CHECK(f.g.label(c) == f.p.grid.state_flat(chain.front().x));
  CHECK_FALSE(f.g.label(cell1(f.p.grid, 1.0, 0.5, 1.0)).has_value());
}
