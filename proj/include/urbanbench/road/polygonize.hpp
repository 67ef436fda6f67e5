#pragma once

#include <optional>
#include <vector>

#include "urbanbench/road/mrf.hpp"

namespace urbanbench::road {

using geom::Polygon;

struct PolygonizeOptions {
  double curb_dontcare_width = 2.0;  // meters, full width of the buffer around unmatched curbs
};

struct ChainPolygons {
  std::vector<Polygon> polygons;
  std::vector<Polygon> dontcare;
  std::vector<std::size_t> unmatched_segments;
};

namespace detail {

inline std::optional<Polygon> try_polygon(std::vector<Point2> ring) {
  auto clean = ring;
  clean.erase(std::unique(clean.begin(), clean.end()), clean.end());
  while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
  if (clean.size() < 3 || geom::signed_area2(clean) == 0.0) return std::nullopt;
  Polygon poly(std::move(clean));
  if (!poly.is_simple()) return std::nullopt;
  return poly;
}

inline void push_if(std::vector<Polygon>& out, std::vector<Point2> ring) {
  if (auto p = try_polygon(std::move(ring))) out.push_back(std::move(*p));
}

// Rectangle of half width `half` around a segment.
inline std::optional<Polygon> segment_buffer(const Segment& s, double half) {
  const double len = s.length();
  if (len == 0.0 || half <= 0.0) return std::nullopt;
  const Point2 d = (1.0 / len) * (s.b - s.a);
  const Point2 n{-d.y * half, d.x * half};
  const Point2 e = d * half;
  return try_polygon({s.a - e - n, s.b + e - n, s.b + e + n, s.a - e + n});
}

// Quad between one curb segment and its projection; splits into two triangles
// where the curb crosses the centerline.
inline void segment_strip(std::vector<Polygon>& out, const Segment& curb, const Segment& center) {
  const Point2 pa = geom::closest_point(curb.a, center);
  const Point2 pb = geom::closest_point(curb.b, center);
  if (auto q = try_polygon({curb.a, curb.b, pb, pa})) {
    out.push_back(std::move(*q));
    return;
  }
  const double oa = geom::orient(center.a, center.b, curb.a);
  const double ob = geom::orient(center.a, center.b, curb.b);
  if (oa * ob < 0.0) {
    const Point2 x = curb.a + (oa / (oa - ob)) * (curb.b - curb.a);
    push_if(out, {curb.a, x, pa});
    push_if(out, {x, curb.b, pb});
  } else {
    push_if(out, {curb.a, curb.b, pb});
    push_if(out, {curb.a, pb, pa});
  }
}

}  // namespace detail

// Strip polygons for every maximal run of curb segments assigned to one
// centerline segment, plus a fill polygon at each switch between adjacent
// centerline segments so corners at junctions are covered.
inline ChainPolygons polygonize(const CurbChain& chain, const Assignment& y, const CenterlineNetwork& net,
                                const PolygonizeOptions& opt = {}) {
  const std::size_t n = chain.size();
  require(y.targets.size() == n, "assignment does not match chain");
  ChainPolygons out;
  if (n == 0) return out;

  for (std::size_t i = 0; i < n; ++i) {
    if (y.targets[i] >= 0) continue;
    out.unmatched_segments.push_back(i);
    if (auto b = detail::segment_buffer(chain.segments[i], 0.5 * opt.curb_dontcare_width))
      out.dontcare.push_back(std::move(*b));
  }

  // Start a closed chain at a run boundary so no run wraps.
  std::size_t start = 0;
  if (chain.closed)
    for (std::size_t i = 0; i < n; ++i)
      if (y.targets[i] != y.targets[(i + n - 1) % n]) {
        start = i;
        break;
      }

  std::size_t k = 0;
  while (k < n) {
    const std::size_t first = (start + k) % n;
    const int target = y.targets[first];
    std::size_t len = 1;
    while (k + len < n && y.targets[(start + k + len) % n] == target) ++len;
    if (target >= 0) {
      const Segment& center = net[static_cast<std::size_t>(target)].seg;
      std::vector<Point2> curb{chain.segments[first].a};
      for (std::size_t j = 0; j < len; ++j) curb.push_back(chain.segments[(first + j) % n].b);
      std::vector<Point2> ring = curb;
      for (auto it = curb.rbegin(); it != curb.rend(); ++it) ring.push_back(geom::closest_point(*it, center));
      if (auto poly = detail::try_polygon(std::move(ring))) {
        out.polygons.push_back(std::move(*poly));
      } else {
        for (std::size_t j = 0; j < len; ++j)
          detail::segment_strip(out.polygons, chain.segments[(first + j) % n], center);
      }
    }
    k += len;
  }

  const std::size_t links = chain.closed ? n : n - 1;
  for (std::size_t i = 0; i < links; ++i) {
    const int a = y.targets[i];
    const int b = y.targets[(i + 1) % n];
    if (a < 0 || b < 0 || a == b) continue;
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    if (!net.adjacent(ia, ib)) continue;
    const Point2 v = chain.segments[i].b;
    const Point2 pa = geom::closest_point(v, net[ia].seg);
    const Point2 pb = geom::closest_point(v, net[ib].seg);
    const Point2 node = net.shared_node(ia, ib);
    if (auto q = detail::try_polygon({v, pa, node, pb})) {
      out.polygons.push_back(std::move(*q));
    } else {
      detail::push_if(out.polygons, {v, pa, node});
      detail::push_if(out.polygons, {v, node, pb});
    }
  }
  return out;
}

}  // namespace urbanbench::road
