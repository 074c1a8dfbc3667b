#include "doctest.h"

#include "cournot/error.hpp"
#include "cournot/grid.hpp"

using namespace cournot;

namespace {

GridSpec p1_grid() {
  return GridSpec::make(Axis::make(0, 4, 0.25), Axis::make(0, 4, 0.25), {Axis::make(-2, 2, 0.25)});
}

}  // namespace

TEST_CASE("axis construction") {
  const Axis a = Axis::make(-2, 2, 0.25);
  CHECK(a.count == 17);
  CHECK(a.value(0) == -2.0);
  CHECK(a.value(16) == 2.0);
  CHECK(Axis::make(0, 1, 0.1).count == 11);
  CHECK_THROWS_AS(Axis::make(0, 1, 0.0), ValidationError);
  CHECK_THROWS_AS(Axis::make(0, 1, -0.5), ValidationError);
  CHECK_THROWS_AS(Axis::make(1, 1, 0.5), ValidationError);
  CHECK_THROWS_AS(Axis::make(0, 1, 0.3), ValidationError);
}

TEST_CASE("axis indexing rounds to the nearest node") {
  const Axis a = Axis::make(0, 4, 0.25);
  CHECK(a.index(1.0) == 4);
  CHECK(a.index(1.1) == 4);
  CHECK(a.index(1.13) == 5);
  CHECK(a.index(4.1) == 16);
  CHECK_FALSE(a.try_index(4.2).has_value());
  CHECK_FALSE(a.try_index(-0.2).has_value());
  CHECK_THROWS_AS(a.index(4.2), OutOfBounds);
}

TEST_CASE("grid invariants") {
  const Axis t = Axis::make(0, 4, 0.25);
  CHECK_THROWS_AS(GridSpec::make(t, Axis::make(0, 4, 0.5), {Axis::make(0, 1, 0.5)}), ValidationError);
  CHECK_THROWS_AS(GridSpec::make(t, Axis::make(0.25, 4, 0.25), {Axis::make(0, 1, 0.5)}), ValidationError);
  CHECK_THROWS_AS(GridSpec::make(t, t, {}), ValidationError);
  const Axis x = Axis::make(0, 1, 0.5);
  CHECK_THROWS_AS(GridSpec::make(t, t, {x, x, x, x}), ValidationError);
  CHECK_NOTHROW(GridSpec::make(t, t, {x, x, x}));
}

TEST_CASE("cell_of on the unit integrator grid") {
  const GridSpec g = p1_grid();
  CHECK(cell_of(g, {0, 0, {0, 0, 0}}) == Cell{0, 0, {8, 0, 0}});
  CHECK(cell_of(g, {1.0, 0.5, {-2.0, 0, 0}}) == Cell{4, 2, {0, 0, 0}});
  CHECK(cell_of(g, {4.1, 0, {0, 0, 0}}).t == 16);
  CHECK_THROWS_AS(cell_of(g, {4.2, 0, {0, 0, 0}}), OutOfBounds);
  CHECK_THROWS_AS(cell_of(g, {0, 0, {2.2, 0, 0}}), OutOfBounds);
}

TEST_CASE("cell_of rounds half away from zero") {
  const GridSpec g = GridSpec::make(Axis::make(0, 4, 1), Axis::make(0, 4, 1), {Axis::make(-2, 2, 1)});
  CHECK(cell_of(g, {0.5, 0, {0, 0, 0}}).t == 1);
  CHECK(cell_of(g, {0, 0, {-0.5, 0, 0}}).x[0] == 1);
  CHECK(cell_of(g, {0, 0, {0.5, 0, 0}}).x[0] == 3);
}

TEST_CASE("point_of inverts cell_of") {
  const GridSpec g = p1_grid();
  const Point p = point_of(g, Cell{0, 0, {8, 0, 0}});
  CHECK(p.t == 0.0);
  CHECK(p.d == 0.0);
  CHECK(p.x[0] == 0.0);
  const Point q = point_of(g, Cell{4, 2, {0, 0, 0}});
  CHECK(q.t == 1.0);
  CHECK(q.d == 0.5);
  CHECK(q.x[0] == -2.0);
  CHECK_THROWS_AS(point_of(g, Cell{17, 0, {0, 0, 0}}), IndexOutOfRange);
  CHECK_THROWS_AS(point_of(g, Cell{0, 0, {17, 0, 0}}), IndexOutOfRange);

  for (std::size_t f = 0; f < g.cell_count(); ++f) {
    const Cell c = g.cell(f);
    REQUIRE(cell_of(g, point_of(g, c)) == c);
    REQUIRE(g.flat(c) == f);
  }
}

TEST_CASE("multi-dimensional state flattening is row-major") {
  const Axis t = Axis::make(0, 1, 0.5);
  const GridSpec g = GridSpec::make(t, t, {Axis::make(0, 2, 1), Axis::make(0, 3, 1)});
  CHECK(g.state_count() == 12);
  CHECK(g.state_flat({1, 2, 0}) == 6);
  CHECK(g.state_index(6) == StateIndex{1, 2, 0});
  CHECK(g.state_point(StateIndex{2, 3, 0}) == StateVec{2, 3, 0});
  CHECK_FALSE(g.try_state_index({2.6, 0, 0}).has_value());
}
