#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "urbanbench/core/error.hpp"

namespace urbanbench {

// Dense row-major 2-D grid. Row 0 is the top (north) row.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(checked(width, height)), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  T& operator()(int col, int row) { return data_[index(col, row)]; }
  const T& operator()(int col, int row) const { return data_[index(col, row)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  std::span<T> row(int r) {
    return {data_.data() + index(0, r), static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int r) const {
    return {data_.data() + index(0, r), static_cast<std::size_t>(width_)};
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static long checked(int w, int h) {
    require(w >= 0 && h >= 0, "raster dimensions must be non-negative");
    return static_cast<long>(w) * static_cast<long>(h);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Binary mask: 0 = unset, anything else = set (writers always store 1).
using Mask = Raster<std::uint8_t>;
using LabelImage = Raster<std::int32_t>;
using Image = Raster<double>;
using ImageF = Raster<float>;

inline std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(
      std::count_if(m.data().begin(), m.data().end(), [](auto v) { return v != 0; }));
}

inline Mask complement(const Mask& m) {
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 0 : 1;
  return out;
}

}  // namespace urbanbench
