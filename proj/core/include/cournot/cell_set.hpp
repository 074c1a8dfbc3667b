#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cournot/grid.hpp"

namespace cournot {

/// Dense bit array over a row-major lattice of arbitrary shape. Tubes,
/// basins and graphs are all stored this way.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::vector<std::size_t> shape);

  /// Shape (count_t, count_d, counts_x...).
  static CellSet over_cells(const GridSpec& g);
  /// Shape (counts_x...).
  static CellSet over_states(const GridSpec& g);
  /// Shape (count_t, counts_x...).
  static CellSet over_time_states(const GridSpec& g);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return size_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }
  void clear();

  std::size_t count() const;
  bool none() const;
  bool is_subset_of(const CellSet& other) const;

  CellSet& operator|=(const CellSet& other);
  CellSet& operator&=(const CellSet& other);
  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  bool operator==(const CellSet& other) const = default;

  /// Calls f(index) for every set bit in ascending order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  /// Calls f(index) for every set bit in [begin, end), ascending.
  template <class F>
  void for_each_in(std::size_t begin, std::size_t end, F&& f) const {
    for (std::size_t i = begin; i < end;) {
      const std::size_t w = i >> 6;
      std::uint64_t bits = words_[w] >> (i & 63);
      if (bits == 0) {
        i = (w + 1) * 64;
        continue;
      }
      i += static_cast<std::size_t>(std::countr_zero(bits));
      if (i >= end) break;
      f(i);
      ++i;
    }
  }

  std::vector<std::size_t> indices() const;

 private:
  void require_same_shape(const CellSet& other) const;

  std::vector<std::size_t> shape_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace cournot
