#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::extract {

struct Contour {
  geom::Polygon ring;  // stored counter-clockwise, like every Polygon
  bool hole = false;
  int parent = -1;  // for holes: index of the enclosing outer contour
};

namespace detail {

// Lattice vertex (x, y) in pixel-corner units, y growing downwards.
struct Corner {
  int x, y;
  auto operator<=>(const Corner&) const = default;
};

}  // namespace detail

// Traces pixel boundaries with the foreground kept on the left. Where two
// foreground pixels touch only at a corner the trace turns so they stay
// apart, and that corner is pulled a hair into the pixel so rings meeting
// there do not share a vertex. Collinear vertices are merged.
inline std::vector<Contour> mask_contours(const Mask& m, const geom::GeoGrid& grid) {
  require(m.width() == grid.width && m.height() == grid.height, "mask does not match grid");
  using detail::Corner;
  const int w = m.width(), h = m.height();
  auto fg = [&](int c, int r) { return c >= 0 && r >= 0 && c < w && r < h && m(c, r) != 0; };

  // Directed edges in image coordinates (y down). With y down, keeping the
  // pixel on the left of travel in world space means: top side runs west,
  // left side runs south, bottom side runs east, right side runs north.
  std::map<Corner, std::vector<Corner>> out_edges;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!fg(c, r)) continue;
      if (!fg(c, r - 1)) out_edges[{c + 1, r}].push_back({c, r});
      if (!fg(c - 1, r)) out_edges[{c, r}].push_back({c, r + 1});
      if (!fg(c, r + 1)) out_edges[{c, r + 1}].push_back({c + 1, r + 1});
      if (!fg(c + 1, r)) out_edges[{c + 1, r + 1}].push_back({c + 1, r});
    }

  auto world = [&](Corner v) {
    return geom::Point2{grid.origin.x + v.x * grid.resolution, grid.origin.y + (h - v.y) * grid.resolution};
  };

  std::vector<Corner> pinch;
  for (const auto& [v, targets] : out_edges)
    if (targets.size() > 1) pinch.push_back(v);
  const double nudge = 1e-3 * grid.resolution;

  std::vector<Contour> out;
  std::vector<std::vector<geom::Point2>> rings;
  std::vector<double> areas;
  for (auto& [start, targets] : out_edges) {
    while (!targets.empty()) {
      std::vector<Corner> loop{start};
      Corner prev = start;
      Corner cur = targets.back();
      targets.pop_back();
      while (!(cur == start)) {
        loop.push_back(cur);
        auto& nxt = out_edges[cur];
        std::size_t pick = 0;
        if (nxt.size() > 1) {
          // Turning left in world space keeps corner-touching pixels apart.
          const int dx = cur.x - prev.x, dy = -(cur.y - prev.y);
          for (std::size_t k = 0; k < nxt.size(); ++k) {
            const int ex = nxt[k].x - cur.x, ey = -(nxt[k].y - cur.y);
            if (dx * ey - dy * ex > 0) pick = k;
          }
        }
        prev = cur;
        cur = nxt[pick];
        nxt.erase(nxt.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      // Drop vertices where the direction does not change.
      std::vector<geom::Point2> pts;
      const std::size_t n = loop.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Corner a = loop[(i + n - 1) % n], b = loop[i], c = loop[(i + 1) % n];
        if ((b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) == 0) continue;
        geom::Point2 p = world(b);
        if (std::binary_search(pinch.begin(), pinch.end(), b)) {
          // World-space left normals of the incoming and outgoing edges.
          const geom::Point2 in{static_cast<double>(b.x - a.x), -static_cast<double>(b.y - a.y)};
          const geom::Point2 o{static_cast<double>(c.x - b.x), -static_cast<double>(c.y - b.y)};
          p = p + (nudge / geom::norm(in)) * geom::Point2{-in.y, in.x} + (nudge / geom::norm(o)) * geom::Point2{-o.y, o.x};
        }
        pts.push_back(p);
      }
      const double a2 = geom::signed_area2(pts);
      rings.push_back(pts);
      areas.push_back(a2);
    }
  }

  for (std::size_t i = 0; i < rings.size(); ++i) out.push_back({geom::Polygon(rings[i]), areas[i] < 0.0, -1});
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].hole) continue;
    // Enclosing outer ring of smallest area; probe just inside the hole's first edge.
    const auto& hr = rings[i];
    const geom::Point2 mid = 0.5 * (hr[0] + hr[1]);
    const geom::Point2 d = hr[1] - hr[0];
    const geom::Point2 probe = mid + (0.25 * grid.resolution / geom::norm(d)) * geom::Point2{-d.y, d.x};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (out[j].hole || areas[j] >= best) continue;
      if (geom::point_in_ring(probe, rings[j])) {
        best = areas[j];
        out[i].parent = static_cast<int>(j);
      }
    }
  }
  return out;
}

}  // namespace urbanbench::extract
