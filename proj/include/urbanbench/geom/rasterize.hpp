#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::geom {

// Scanline over one or more rings under the even-odd rule: a pixel is inside
// iff its center is. Calls span(row, c0, c1) for every inside run [c0, c1).
// Only rows overlapping the rings' bounding box are visited.
template <typename SpanFn>
void scan_rings(const GeoGrid& grid, std::span<const std::vector<Point2>> rings, SpanFn&& span) {
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& ring : rings)
    for (const auto& p : ring) {
      ylo = std::min(ylo, p.y);
      yhi = std::max(yhi, p.y);
    }
  if (!(ylo <= yhi)) return;
  const double res = grid.resolution;
  const int row_lo = std::max(0, static_cast<int>(std::floor(grid.height - (yhi - grid.origin.y) / res - 1.0)));
  const int row_hi = std::min(grid.height - 1, static_cast<int>(std::ceil(grid.height - (ylo - grid.origin.y) / res)));

  std::vector<double> xs;
  for (int r = row_lo; r <= row_hi; ++r) {
    const double py = grid.origin.y + (grid.height - r - 0.5) * res;
    xs.clear();
    for (const auto& ring : rings) {
      const std::size_t n = ring.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = ring[j], b = ring[i];
        if ((a.y > py) != (b.y > py)) xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double x0 = xs[k], x1 = xs[k + 1];
      int c = std::max(0, static_cast<int>(std::floor((x0 - grid.origin.x) / res - 0.5)) - 1);
      while (c < grid.width && grid.origin.x + (c + 0.5) * res < x0) ++c;
      int e = c;
      while (e < grid.width && grid.origin.x + (e + 0.5) * res < x1) ++e;
      if (e > c) span(r, c, e);
    }
  }
}

inline void fill_rings(Mask& mask, const GeoGrid& grid, std::span<const std::vector<Point2>> rings,
                       std::uint8_t value = 1) {
  require(mask.width() == grid.width && mask.height() == grid.height,
          "mask does not match grid dimensions");
  scan_rings(grid, rings, [&](int r, int c0, int c1) {
    auto row = mask.row(r);
    std::fill(row.begin() + c0, row.begin() + c1, value);
  });
}

// Sorted row-major indices of the pixels inside `poly`.
inline std::vector<std::uint32_t> pixel_indices(const Polygon& poly, const GeoGrid& grid) {
  std::vector<std::uint32_t> out;
  const std::vector<Point2>* ring = &poly.ring();
  scan_rings(grid, std::span<const std::vector<Point2>>(ring, 1), [&](int r, int c0, int c1) {
    const auto base = static_cast<std::uint32_t>(r) * static_cast<std::uint32_t>(grid.width);
    for (int c = c0; c < c1; ++c) out.push_back(base + static_cast<std::uint32_t>(c));
  });
  return out;
}

inline void fill_polygon(Mask& mask, const GeoGrid& grid, const Polygon& poly, std::uint8_t value = 1) {
  const std::vector<Point2>* ring = &poly.ring();
  fill_rings(mask, grid, std::span<const std::vector<Point2>>(ring, 1), value);
}

inline Mask rasterize(const Polygon& poly, const GeoGrid& grid) {
  grid.validate();
  Mask m(grid.width, grid.height);
  fill_polygon(m, grid, poly);
  return m;
}

// Union of polygons; each polygon is filled on its own so overlaps stay set.
inline Mask rasterize(std::span<const Polygon> polys, const GeoGrid& grid) {
  grid.validate();
  Mask m(grid.width, grid.height);
  for (const auto& p : polys) fill_polygon(m, grid, p);
  return m;
}

inline double mask_iou(const Mask& a, const Mask& b) {
  require(a.same_shape(b), "mask_iou: dimension mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0, y = b[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace urbanbench::geom
