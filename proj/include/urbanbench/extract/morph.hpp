#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "urbanbench/core/raster.hpp"

namespace urbanbench::extract {

enum class MorphOp { kErode, kDilate, kOpen, kClose };

// Disk structuring element: offsets (dx, dy) with dx^2 + dy^2 <= radius^2.
struct StructuringElement {
  int radius = 10;
};

namespace detail {

// One-dimensional squared distance transform (lower envelope of parabolas).
inline void edt_1d(const double* f, int n, std::ptrdiff_t stride, double* d, std::vector<int>& v,
                   std::vector<double>& z) {
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto at = [&](int i) { return f[i * stride] + static_cast<double>(i) * i; };
  std::size_t k = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = (at(q) - at(v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = (at(q) - at(v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    d[q * stride] = static_cast<double>(q - p) * (q - p) + f[p * stride];
  }
}

}  // namespace detail

// Exact squared Euclidean distance (in pixels) from each pixel to the nearest
// pixel where `mask == target`. Pixels with no such pixel get a huge value.
inline Image squared_distance_to(const Mask& mask, std::uint8_t target) {
  const int w = mask.width(), h = mask.height();
  constexpr double kFar = 1e20;
  Image f(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) f[i] = ((mask[i] != 0) == (target != 0)) ? 0.0 : kFar;
  Image g(w, h);
  std::vector<int> v;
  std::vector<double> z;
  for (int c = 0; c < w; ++c) detail::edt_1d(&f(c, 0), h, w, &g(c, 0), v, z);
  for (int r = 0; r < h; ++r) detail::edt_1d(&g(0, r), w, 1, &f(0, r), v, z);
  return f;
}

// Outside the raster counts as background for dilation and as foreground for
// erosion, which keeps the two exactly dual and adjoint.
inline Mask dilate(const Mask& m, const StructuringElement& se) {
  require(se.radius >= 1, "structuring element radius must be at least 1");
  const Image d = squared_distance_to(m, 1);
  const double r2 = static_cast<double>(se.radius) * se.radius;
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = d[i] <= r2;
  return out;
}

inline Mask erode(const Mask& m, const StructuringElement& se) {
  require(se.radius >= 1, "structuring element radius must be at least 1");
  const Image d = squared_distance_to(m, 0);
  const double r2 = static_cast<double>(se.radius) * se.radius;
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = d[i] > r2;
  return out;
}

inline Mask morph(const Mask& m, MorphOp op, const StructuringElement& se) {
  switch (op) {
    case MorphOp::kErode: return erode(m, se);
    case MorphOp::kDilate: return dilate(m, se);
    case MorphOp::kOpen: return dilate(erode(m, se), se);
    case MorphOp::kClose: return erode(dilate(m, se), se);
  }
  fail(ErrorCode::kInvalidArgument, "unknown morphology op");
}

}  // namespace urbanbench::extract
