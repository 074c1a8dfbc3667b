#include "cournot/cell_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace cournot {

CellSet::CellSet(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  size_ = 1;
  for (std::size_t n : shape_) size_ *= n;
  words_.assign((size_ + 63) / 64, 0);
}

CellSet CellSet::over_cells(const GridSpec& g) {
  std::vector<std::size_t> shape{g.t_axis.count, g.d_axis.count};
  for (const Axis& a : g.x_axes) shape.push_back(a.count);
  return CellSet(std::move(shape));
}

CellSet CellSet::over_states(const GridSpec& g) {
  std::vector<std::size_t> shape;
  for (const Axis& a : g.x_axes) shape.push_back(a.count);
  return CellSet(std::move(shape));
}

CellSet CellSet::over_time_states(const GridSpec& g) {
  std::vector<std::size_t> shape{g.t_axis.count};
  for (const Axis& a : g.x_axes) shape.push_back(a.count);
  return CellSet(std::move(shape));
}

void CellSet::clear() { std::fill(words_.begin(), words_.end(), 0); }

std::size_t CellSet::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool CellSet::none() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

void CellSet::require_same_shape(const CellSet& other) const {
  if (shape_ != other.shape_) throw std::invalid_argument("CellSet shape mismatch");
}

bool CellSet::is_subset_of(const CellSet& other) const {
  require_same_shape(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

CellSet& CellSet::operator|=(const CellSet& other) {
  require_same_shape(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& other) {
  require_same_shape(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

std::vector<std::size_t> CellSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace cournot
