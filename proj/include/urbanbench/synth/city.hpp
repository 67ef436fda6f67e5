#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "urbanbench/core/error.hpp"
#include "urbanbench/core/vector_map.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::synth {

struct CityParams {
  std::uint64_t seed = 1;
  double extent = 1000.0;  // square city, meters
  double tile_size = 500.0;
  double block_min = 60.0;
  double block_max = 110.0;
  double road_width_min = 8.0;
  double road_width_max = 14.0;
  double node_jitter = 3.0;
  double fillet_radius = 4.0;
  double sidewalk_width = 2.5;
  double setback = 1.0;
  double curb_step = 4.0;        // max curb segment length
  double centerline_step = 25.0;  // max centerline segment length
  double building_coverage = 0.3;  // target footprint fraction of buildable block area
  double building_gap = 1.0;
  double area_mean = 148.0;
  double area_log_sigma = 0.5;
  double height_mean = 4.7;
  double height_log_sigma = 0.35;
  double p_residential = 0.6;
  double p_others = 0.25;  // remainder is open space

  void validate() const {
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(pos(extent) && pos(tile_size), "extent and tile size must be positive", ErrorCode::kConfig);
    const double tiles = extent / tile_size;
    require(std::abs(tiles - std::round(tiles)) < 1e-9, "extent must be a whole number of tiles", ErrorCode::kConfig);
    require(pos(block_min) && block_max >= block_min, "bad block size range", ErrorCode::kConfig);
    require(pos(road_width_min) && road_width_max >= road_width_min, "bad road width range", ErrorCode::kConfig);
    require(node_jitter >= 0.0 && fillet_radius >= 0.0 && sidewalk_width >= 0.0 && setback >= 0.0,
            "negative city parameter", ErrorCode::kConfig);
    require(pos(curb_step) && pos(centerline_step), "steps must be positive", ErrorCode::kConfig);
    require(building_coverage >= 0.0 && building_coverage < 1.0, "coverage must be in [0,1)", ErrorCode::kConfig);
    require(pos(area_mean) && pos(height_mean) && area_log_sigma >= 0.0 && height_log_sigma >= 0.0,
            "bad building distribution", ErrorCode::kConfig);
    require(p_residential >= 0.0 && p_others >= 0.0 && p_residential + p_others <= 1.0,
            "bad zoning probabilities", ErrorCode::kConfig);
    require(block_min > road_width_max + 2.0 * (sidewalk_width + setback + node_jitter) + 10.0,
            "blocks too small for the road width", ErrorCode::kConfig);
    require(extent >= 2.0 * block_max + 4.0 * road_width_max, "extent too small for one block", ErrorCode::kConfig);
  }
};

namespace detail {

using geom::Point2;

inline Point2 left_normal(Point2 d) {
  const double n = geom::norm(d);
  return {-d.y / n, d.x / n};
}

inline Point2 line_intersection(Point2 p, Point2 d, Point2 q, Point2 e) {
  const double den = geom::cross(d, e);
  require(std::abs(den) > 1e-12, "parallel offset lines", ErrorCode::kDegenerate);
  const double t = geom::cross(q - p, e) / den;
  return p + t * d;
}

// Offsets every edge of a ccw ring to its left by the edge's own distance and
// intersects consecutive offset lines. Negative distances move outwards.
inline std::vector<Point2> offset_ring(const std::vector<Point2>& ring, const std::vector<double>& d) {
  const std::size_t n = ring.size();
  std::vector<Point2> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    const Point2 d0 = ring[k] - ring[prev], d1 = ring[(k + 1) % n] - ring[k];
    const Point2 p0 = ring[prev] + d[prev] * left_normal(d0);
    const Point2 p1 = ring[k] + d[k] * left_normal(d1);
    out[k] = geom::cross(d0, d1) == 0.0 ? p1 : line_intersection(p0, d0, p1, d1);
  }
  return out;
}

// Rounds each convex corner of a ccw ring with a circular arc.
inline std::vector<Point2> fillet_ring(const std::vector<Point2>& ring, double radius, int arc_steps = 6) {
  if (radius <= 0.0) return ring;
  const std::size_t n = ring.size();
  std::vector<Point2> out;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 v = ring[k];
    const Point2 a = ring[(k + n - 1) % n] - v, b = ring[(k + 1) % n] - v;
    const double la = geom::norm(a), lb = geom::norm(b);
    const Point2 ua = (1.0 / la) * a, ub = (1.0 / lb) * b;
    const double theta = std::acos(std::clamp(geom::dot(ua, ub), -1.0, 1.0));
    const double t = radius / std::tan(0.5 * theta);
    if (geom::cross(ub, ua) <= 0.0 || theta > 0.9 * std::numbers::pi || t > 0.45 * std::min(la, lb)) {
      out.push_back(v);
      continue;
    }
    const Point2 bis = (1.0 / geom::norm(ua + ub)) * (ua + ub);
    const Point2 c = v + (radius / std::sin(0.5 * theta)) * bis;
    const Point2 s = v + t * ua, e = v + t * ub;
    double a0 = std::atan2(s.y - c.y, s.x - c.x);
    double a1 = std::atan2(e.y - c.y, e.x - c.x);
    while (a1 < a0) a1 += 2.0 * std::numbers::pi;
    for (int i = 0; i <= arc_steps; ++i) {
      const double ang = a0 + (a1 - a0) * i / arc_steps;
      out.push_back({c.x + radius * std::cos(ang), c.y + radius * std::sin(ang)});
    }
  }
  return out;
}

// Splits every edge of a closed ring into pieces no longer than `step`.
inline std::vector<Point2> densify_ring(const std::vector<Point2>& ring, double step) {
  std::vector<Point2> out;
  const std::size_t n = ring.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 a = ring[k], b = ring[(k + 1) % n];
    const int pieces = std::max(1, static_cast<int>(std::ceil(geom::dist(a, b) / step - 1e-9)));
    for (int i = 0; i < pieces; ++i) out.push_back(a + (static_cast<double>(i) / pieces) * (b - a));
  }
  return out;
}

inline std::vector<Point2> densify_line(Point2 a, Point2 b, double step) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(geom::dist(a, b) / step - 1e-9)));
  std::vector<Point2> out;
  for (int i = 0; i <= pieces; ++i) out.push_back(i == pieces ? b : a + (static_cast<double>(i) / pieces) * (b - a));
  return out;
}

inline std::array<Point2, 4> oriented_rect(Point2 c, double w, double h, double angle) {
  const Point2 u{std::cos(angle), std::sin(angle)}, v{-std::sin(angle), std::cos(angle)};
  const Point2 a = (0.5 * w) * u, b = (0.5 * h) * v;
  return {c - a - b, c + a - b, c + a + b, c - a + b};
}

// Separating-axis test for two convex quads.
inline bool quads_overlap(const std::array<Point2, 4>& p, const std::array<Point2, 4>& q) {
  for (const auto* s : {&p, &q})
    for (int k = 0; k < 4; ++k) {
      const Point2 e = (*s)[(k + 1) % 4] - (*s)[k];
      const Point2 ax{-e.y, e.x};
      double p0 = 1e300, p1 = -1e300, q0 = 1e300, q1 = -1e300;
      for (const auto& v : p) {
        p0 = std::min(p0, geom::dot(v, ax));
        p1 = std::max(p1, geom::dot(v, ax));
      }
      for (const auto& v : q) {
        q0 = std::min(q0, geom::dot(v, ax));
        q1 = std::max(q1, geom::dot(v, ax));
      }
      if (p1 <= q0 || q1 <= p0) return false;
    }
  return true;
}

inline bool inside_convex(Point2 p, const std::vector<Point2>& ccw) {
  for (std::size_t k = 0; k < ccw.size(); ++k)
    if (geom::orient(ccw[k], ccw[(k + 1) % ccw.size()], p) <= 0.0) return false;
  return true;
}

inline std::vector<double> grid_lines(std::mt19937_64& rng, const CityParams& p, double margin) {
  std::uniform_real_distribution<double> gap(p.block_min, p.block_max);
  std::vector<double> xs{margin};
  for (;;) {
    const double next = xs.back() + gap(rng);
    if (next > p.extent - margin) break;
    xs.push_back(next);
  }
  // Stretch so the last line sits on the far margin.
  const double scale = (p.extent - 2.0 * margin) / (xs.back() - margin);
  if (xs.size() >= 2)
    for (auto& x : xs) x = margin + (x - margin) * scale;
  return xs;
}

}  // namespace detail

// Jittered grid city. Blocks are grid faces inset by half the width of each
// bounding road and filleted at the corners; the curbs are the block rings
// plus the outer boundary of the network, so the road surface is exactly
// road_outer minus the blocks.
inline VectorMap generate_city(const CityParams& p) {
  p.validate();
  using geom::Point2;
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };

  const double margin = 0.5 * p.road_width_max + p.node_jitter + 10.0;
  const std::vector<double> xs = detail::grid_lines(rng, p, margin);
  const std::vector<double> ys = detail::grid_lines(rng, p, margin);
  require(xs.size() >= 2 && ys.size() >= 2, "city too small for a block", ErrorCode::kConfig);
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());

  std::vector<double> col_width(nx), row_width(ny);
  for (auto& w : col_width) w = uniform(p.road_width_min, p.road_width_max);
  for (auto& w : row_width) w = uniform(p.road_width_min, p.road_width_max);

  std::vector<Point2> nodes(static_cast<std::size_t>(nx * ny));
  auto node_id = [&](int i, int j) { return static_cast<long>(j) * nx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      nodes[node_id(i, j)] = {xs[i] + uniform(-p.node_jitter, p.node_jitter),
                              ys[j] + uniform(-p.node_jitter, p.node_jitter)};
  auto node = [&](int i, int j) { return nodes[node_id(i, j)]; };

  VectorMap map;
  map.origin = {0.0, 0.0};
  map.extent_x = map.extent_y = p.extent;

  // Centerlines: one polyline per grid edge.
  int next_id = 1;
  auto add_centerline = [&](int i0, int j0, int i1, int j1, double width) {
    map.centerlines.push_back({next_id++, geom::Polyline(detail::densify_line(node(i0, j0), node(i1, j1), p.centerline_step)),
                               node_id(i0, j0), node_id(i1, j1), width});
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) add_centerline(i, j, i + 1, j, row_width[j]);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) add_centerline(i, j, i, j + 1, col_width[i]);

  // Outer curb: perimeter offset outwards.
  std::vector<Point2> perim;
  std::vector<double> perim_off;
  for (int i = 0; i + 1 < nx; ++i) perim.push_back(node(i, 0)), perim_off.push_back(-0.5 * row_width[0]);
  for (int j = 0; j + 1 < ny; ++j) perim.push_back(node(nx - 1, j)), perim_off.push_back(-0.5 * col_width[nx - 1]);
  for (int i = nx - 1; i > 0; --i) perim.push_back(node(i, ny - 1)), perim_off.push_back(-0.5 * row_width[ny - 1]);
  for (int j = ny - 1; j > 0; --j) perim.push_back(node(0, j)), perim_off.push_back(-0.5 * col_width[0]);
  const std::vector<Point2> outer = detail::densify_ring(detail::offset_ring(perim, perim_off), p.curb_step);
  map.road_outer = geom::Polygon(outer);

  auto closed = [](std::vector<Point2> ring) {
    ring.push_back(ring.front());
    return geom::Polyline(std::move(ring));
  };
  map.curbs.push_back(closed(map.road_outer->ring()));

  const double mu_area = std::log(p.area_mean) - 0.5 * p.area_log_sigma * p.area_log_sigma;
  const double mu_height = std::log(p.height_mean) - 0.5 * p.height_log_sigma * p.height_log_sigma;
  std::lognormal_distribution<double> area_dist(mu_area, p.area_log_sigma);
  std::lognormal_distribution<double> height_dist(mu_height, p.height_log_sigma);

  int block_id = 1, building_id = 1;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const std::vector<Point2> quad{node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
      const std::vector<double> half{0.5 * row_width[j], 0.5 * col_width[i + 1], 0.5 * row_width[j + 1], 0.5 * col_width[i]};
      const std::vector<Point2> ring = detail::densify_ring(
          detail::fillet_ring(detail::offset_ring(quad, half), p.fillet_radius), p.curb_step);
      const double r = unit(rng);
      const ZoneType zone = r < p.p_residential ? ZoneType::kResidential
                            : r < p.p_residential + p.p_others ? ZoneType::kOthers
                                                               : ZoneType::kOpenSpace;
      map.blocks.push_back({block_id++, geom::Polygon(ring), zone});
      map.curbs.push_back(closed(ring));
      if (zone == ZoneType::kOpenSpace) continue;

      // Buildable area: the block quad pulled in past sidewalk and setback.
      std::vector<double> inner_off = half;
      for (auto& d : inner_off) d += p.sidewalk_width + p.setback;
      const std::vector<Point2> lot = detail::offset_ring(quad, inner_off);
      const double lot_area = 0.5 * geom::signed_area2(lot);
      if (lot_area <= 0.0) continue;
      double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
      for (const auto& v : lot) {
        lx0 = std::min(lx0, v.x), lx1 = std::max(lx1, v.x);
        ly0 = std::min(ly0, v.y), ly1 = std::max(ly1, v.y);
      }
      const double base_angle = std::atan2(quad[1].y - quad[0].y, quad[1].x - quad[0].x);
      const int target = static_cast<int>(std::round(p.building_coverage * lot_area / p.area_mean));
      std::vector<std::array<Point2, 4>> placed;
      for (int b = 0; b < target; ++b) {
        const double area = area_dist(rng);
        const double aspect = uniform(0.6, 1.6);
        const double w = std::sqrt(area * aspect), h = area / w;
        const double angle = base_angle + uniform(-0.08, 0.08);
        const double height = height_dist(rng);
        for (int attempt = 0; attempt < 40; ++attempt) {
          const Point2 c{uniform(lx0, lx1), uniform(ly0, ly1)};
          const auto q = detail::oriented_rect(c, w, h, angle);
          if (!std::all_of(q.begin(), q.end(), [&](Point2 v) { return detail::inside_convex(v, lot); })) continue;
          const auto grown = detail::oriented_rect(c, w + p.building_gap, h + p.building_gap, angle);
          if (std::any_of(placed.begin(), placed.end(), [&](const auto& o) { return detail::quads_overlap(grown, o); }))
            continue;
          placed.push_back(q);
          map.buildings.push_back({building_id++, geom::Polygon({q[0], q[1], q[2], q[3]}), height});
          break;
        }
      }
    }
  return map;
}

}  // namespace urbanbench::synth
