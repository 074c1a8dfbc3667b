#pragma once

#include <string>
#include <vector>

#include "cournot/basin.hpp"
#include "cournot/problem.hpp"

namespace support {

inline std::string fixture(const std::string& name) { return std::string(COURNOT_FIXTURE_DIR) + "/" + name; }

/// Cell of a 1-D problem from lattice coordinates.
inline cournot::Cell cell1(const cournot::GridSpec& g, double t, double d, double x) {
  return cournot::cell_of(g, cournot::Point{t, d, {x, 0, 0}});
}

inline cournot::StateVec x1(double x) { return {x, 0, 0}; }

inline cournot::CellSet to_cells(const cournot::GridSpec& g, const std::vector<char>& bits) {
  cournot::CellSet out = cournot::CellSet::over_cells(g);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.set(i);
  }
  return out;
}

}  // namespace support
