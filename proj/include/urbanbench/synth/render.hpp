#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "urbanbench/core/raster.hpp"
#include "urbanbench/core/vector_map.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::synth {

enum SemanticClass : std::uint8_t { kBackground = 0, kRoad = 1, kBuilding = 2 };

struct RenderOptions {
  std::uint64_t seed = 0;  // texture seed, independent of the city seed
  bool texture = true;     // false: ground-truth masks only
  double sidewalk_width = 2.5;
  double marking_width = 0.15;
  double dash_length = 3.0;
  double shadow_scale = 0.6;  // shadow length per meter of height
  // Value-noise amplitudes for a fine cell, 1.2 m and 5 m cells.
  double noise_cell = 0.3;
  double noise_fine = 0.45;
  double noise_mid = 0.25;
  double noise_coarse = 0.10;
};

struct AerialTile {
  geom::GeoGrid grid;
  ImageF image;        // intensities in [0, 1]
  Mask semantic;       // SemanticClass
  LabelImage instance; // building id, 0 elsewhere
  Mask zoning;         // ZoneType of the block, 0 on roads and outside
  ImageF height;       // building height, 0 elsewhere
  Mask dontcare;
};

namespace detail {

using geom::Point2;

// Row-by-row crossing fill used for ground truth. It shares no code with the
// geom rasterizer: crossings come from the edge parameter t, columns from a
// ceil of the crossing position.
template <typename Fn>
void scanline_fill(const geom::GeoGrid& g, const std::vector<Point2>& ring, Fn&& fn) {
  if (ring.size() < 3) return;
  double y0 = ring[0].y, y1 = ring[0].y, x0 = ring[0].x, x1 = ring[0].x;
  for (const auto& p : ring) {
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
  }
  if (x1 < g.origin.x || x0 > g.origin.x + g.width * g.resolution) return;
  // Row r has center y = oy + (H - r - 0.5) res.
  const double fr0 = g.height - 0.5 - (y1 - g.origin.y) / g.resolution;
  const double fr1 = g.height - 0.5 - (y0 - g.origin.y) / g.resolution;
  const int r_begin = std::max(0, static_cast<int>(std::floor(fr0)));
  const int r_end = std::min(g.height - 1, static_cast<int>(std::ceil(fr1)));
  std::vector<double> cross;
  for (int r = r_begin; r <= r_end; ++r) {
    const double py = g.origin.y + (g.height - r - 0.5) * g.resolution;
    cross.clear();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2 a = ring[i], b = ring[(i + 1) % ring.size()];
      const double lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
      if (py < lo || py >= hi) continue;
      const double t = (py - a.y) / (b.y - a.y);
      cross.push_back(a.x + t * (b.x - a.x));
    }
    std::sort(cross.begin(), cross.end());
    for (std::size_t k = 0; k + 1 < cross.size(); k += 2) {
      // Columns whose center lies in [cross[k], cross[k+1]).
      const int c0 = std::max(0, static_cast<int>(std::ceil((cross[k] - g.origin.x) / g.resolution - 0.5)));
      const int c1 = std::min(g.width, static_cast<int>(std::ceil((cross[k + 1] - g.origin.x) / g.resolution - 0.5)));
      for (int c = c0; c < c1; ++c) fn(c, r);
    }
  }
}

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double lattice(std::int64_t i, std::int64_t j, std::uint64_t salt) {
  const std::uint64_t h = mix(mix(static_cast<std::uint64_t>(i) ^ salt) ^ static_cast<std::uint64_t>(j) * 0x632be59bd9b4e019ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Smooth value noise in [0, 1) on a lattice of the given cell size.
inline double value_noise(Point2 p, double cell, std::uint64_t salt) {
  const double fx = p.x / cell, fy = p.y / cell;
  const double ix = std::floor(fx), iy = std::floor(fy);
  double tx = fx - ix, ty = fy - iy;
  tx = tx * tx * (3.0 - 2.0 * tx);
  ty = ty * ty * (3.0 - 2.0 * ty);
  const auto i = static_cast<std::int64_t>(ix), j = static_cast<std::int64_t>(iy);
  const double a = lattice(i, j, salt), b = lattice(i + 1, j, salt);
  const double c = lattice(i, j + 1, salt), d = lattice(i + 1, j + 1, salt);
  return (a + (b - a) * tx) * (1.0 - ty) + (c + (d - c) * tx) * ty;
}

inline double texture_noise(Point2 p, std::uint64_t seed, double cell, double fine, double mid, double coarse) {
  return fine * (value_noise(p, cell, seed ^ 0x11) - 0.5) + mid * (value_noise(p, 1.2, seed ^ 0x22) - 0.5) +
         coarse * (value_noise(p, 5.0, seed ^ 0x33) - 0.5);
}

inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && geom::orient(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && geom::orient(h[k - 2], h[k - 1], pts[i - 1]) <= 0.0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

// Ring pulled inwards by d along each edge's normal.
inline std::vector<Point2> inset(const std::vector<Point2>& ccw, double d) {
  const std::size_t n = ccw.size();
  std::vector<Point2> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 p = ccw[(k + n - 1) % n], v = ccw[k], q = ccw[(k + 1) % n];
    const Point2 e0 = v - p, e1 = q - v;
    const Point2 n0 = (1.0 / geom::norm(e0)) * Point2{-e0.y, e0.x};
    const Point2 n1 = (1.0 / geom::norm(e1)) * Point2{-e1.y, e1.x};
    const Point2 m = n0 + n1;
    const double c = geom::dot(m, n1);
    out[k] = c > 1e-9 ? v + (d / c) * m : v + d * n1;
  }
  return out;
}

inline bool bbox_hits(const std::vector<Point2>& ring, const geom::GeoGrid& g, double pad = 0.0) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : ring) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  return x1 + pad >= g.min_x() && x0 - pad <= g.max_x() && y1 + pad >= g.min_y() && y0 - pad <= g.max_y();
}

}  // namespace detail

// Renders one tile of the map: exact truth masks from the vector data and,
// if requested, a textured intensity image. Every pixel depends only on its
// world position, so overlapping crops agree.
inline AerialTile render_aerial(const VectorMap& map, const geom::GeoGrid& grid, const RenderOptions& opt = {}) {
  grid.validate();
  const double tol = 1e-6;
  require(grid.min_x() >= map.origin.x - tol && grid.min_y() >= map.origin.y - tol &&
              grid.max_x() <= map.origin.x + map.extent_x + tol && grid.max_y() <= map.origin.y + map.extent_y + tol,
          "tile lies outside the map extent");
  using detail::Point2;
  const int w = grid.width, h = grid.height;
  AerialTile t{grid, ImageF(), Mask(w, h, kBackground), LabelImage(w, h, 0), Mask(w, h, 0), ImageF(w, h, 0.0f), Mask(w, h, 0)};

  // Surface kinds used for shading.
  enum : std::uint8_t { kOutskirt, kAsphalt, kSidewalk, kLawn, kPark, kRoof };
  Mask kind(w, h, kOutskirt);

  if (map.road_outer)
    detail::scanline_fill(grid, map.road_outer->ring(), [&](int c, int r) {
      t.semantic(c, r) = kRoad;
      kind(c, r) = kAsphalt;
    });
  for (const auto& b : map.blocks) {
    if (!detail::bbox_hits(b.boundary.ring(), grid)) continue;
    detail::scanline_fill(grid, b.boundary.ring(), [&](int c, int r) {
      t.semantic(c, r) = kBackground;
      t.zoning(c, r) = static_cast<std::uint8_t>(b.zone);
      kind(c, r) = kSidewalk;
    });
    if (opt.texture) {
      const std::uint8_t inner = b.zone == ZoneType::kOpenSpace ? kPark : kLawn;
      detail::scanline_fill(grid, detail::inset(b.boundary.ring(), opt.sidewalk_width),
                            [&](int c, int r) { kind(c, r) = inner; });
    }
  }
  std::vector<const MapBuilding*> visible;
  for (const auto& b : map.buildings) {
    if (!detail::bbox_hits(b.footprint.ring(), grid, opt.shadow_scale * b.height)) continue;
    visible.push_back(&b);
    detail::scanline_fill(grid, b.footprint.ring(), [&](int c, int r) {
      t.semantic(c, r) = kBuilding;
      t.instance(c, r) = b.id;
      t.height(c, r) = static_cast<float>(b.height);
      kind(c, r) = kRoof;
    });
  }
  if (!opt.texture) return t;

  Mask marking(w, h, 0), shadow(w, h, 0);
  for (const auto& cl : map.centerlines) {
    if (!detail::bbox_hits(cl.line.vertices(), grid, 1.0)) continue;
    const double total = cl.line.length();
    const double skip = 0.5 * (cl.width > 0.0 ? cl.width : 8.0) + 2.0;
    double s0 = 0.0;
    for (std::size_t i = 0; i < cl.line.segment_count(); ++i) {
      const auto seg = cl.line.segment(i);
      const double len = seg.length();
      const Point2 u = (1.0 / len) * seg.direction(), nrm{-u.y, u.x};
      for (double s = std::ceil(s0 / (2 * opt.dash_length)) * 2 * opt.dash_length; s < s0 + len;
           s += 2 * opt.dash_length) {
        const double a = std::max(s, std::max(s0, skip)), b = std::min({s + opt.dash_length, s0 + len, total - skip});
        if (b <= a) continue;
        const Point2 p = seg.a + (a - s0) * u, q = seg.a + (b - s0) * u, o = (0.5 * opt.marking_width) * nrm;
        detail::scanline_fill(grid, {p - o, q - o, q + o, p + o}, [&](int c, int r) { marking(c, r) = 1; });
      }
      s0 += len;
    }
  }
  const Point2 sun{0.6, -0.8};
  for (const auto* b : visible) {
    std::vector<Point2> pts = b->footprint.ring();
    for (const auto& v : b->footprint.ring()) pts.push_back(v + (opt.shadow_scale * b->height) * sun);
    detail::scanline_fill(grid, detail::convex_hull(pts), [&](int c, int r) { shadow(c, r) = 1; });
  }

  t.image = ImageF(w, h, 0.0f);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const Point2 p = grid.pixel_center(c, r);
      double v = 0.5;
      switch (kind(c, r)) {
        case kOutskirt: v = 0.5; break;
        case kAsphalt: v = marking(c, r) ? 0.92 : 0.22; break;
        case kSidewalk: v = 0.64; break;
        case kLawn: v = 0.42; break;
        case kPark: v = 0.33; break;
        case kRoof: v = 0.5 + 0.35 * detail::lattice(t.instance(c, r), 7, opt.seed ^ 0x44); break;
      }
      if (shadow(c, r) && kind(c, r) != kRoof) v *= 0.55;
      v += detail::texture_noise(p, opt.seed, opt.noise_cell, opt.noise_fine, opt.noise_mid, opt.noise_coarse);
      t.image(c, r) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  return t;
}

}  // namespace urbanbench::synth
