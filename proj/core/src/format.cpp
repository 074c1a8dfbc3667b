#include "cournot/format.hpp"

#include <charconv>
#include <cmath>

namespace cournot {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void append_state(std::string& out, const StateVec& x, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    if (i > 0) out += ',';
    out += format_real(x[i]);
  }
}

}  // namespace cournot
