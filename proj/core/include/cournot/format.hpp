#pragma once

#include <string>

#include "cournot/grid.hpp"

namespace cournot {

/// Shortest round-trip decimal; `inf` / `-inf` for infinities, 0 for -0.
std::string format_real(double v);

/// Appends `x1,x2,...` (dim components) to out.
void append_state(std::string& out, const StateVec& x, std::size_t dim);

}  // namespace cournot
