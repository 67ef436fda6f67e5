#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <tuple>
#include <vector>

#include "urbanbench/align/panorama.hpp"
#include "urbanbench/align/rectify.hpp"

namespace urbanbench::align {

// Projects curb vertices into panorama pixel coordinates. Vertices closer
// than min_range (or farther than max_range) are dropped and split the
// polyline, as do jumps across the azimuth seam.
inline std::vector<std::vector<geom::Point2>> project_curbs(const std::vector<geom::Polyline>& curbs, const CameraPose& pose,
                                                            int width, int height, double min_range = 0.5,
                                                            double max_range = INFINITY) {
  std::vector<std::vector<geom::Point2>> out;
  for (const auto& line : curbs) {
    std::vector<geom::Point2> cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    };
    for (const auto& v : line.vertices()) {
      const geom::Point2 d = v - pose.position;
      const double range = geom::norm(d);
      if (range < min_range || range > max_range) {
        flush();
        continue;
      }
      const geom::Point2 uv = panorama_coords(d.x, d.y, pose.height, pose.heading, width, height);
      if (!cur.empty() && std::abs(uv.x - cur.back().x) > 0.5 * width) flush();
      cur.push_back(uv);
    }
    flush();
  }
  return out;
}

// Ground points along the curbs spaced so that consecutive points project
// about one pixel apart as seen from `pose`.
inline std::vector<geom::Point2> curb_samples(const std::vector<geom::Polyline>& curbs, const CameraPose& pose,
                                              int width, int height, double min_range, double max_range) {
  std::vector<geom::Point2> out;
  auto keep = [&](geom::Point2 g) {
    const double r = geom::dist(g, pose.position);
    return r >= min_range && r <= max_range;
  };
  for (const auto& line : curbs)
    for (std::size_t i = 0; i < line.segment_count(); ++i) {
      const geom::Segment s = line.segment(i);
      // Skip segments entirely outside the range annulus.
      if (geom::point_segment_distance(pose.position, s) > max_range) continue;
      const geom::Point2 a = s.a - pose.position, b = s.b - pose.position;
      const geom::Point2 pa = panorama_coords(a.x, a.y, pose.height, pose.heading, width, height);
      const geom::Point2 pb = panorama_coords(b.x, b.y, pose.height, pose.heading, width, height);
      double du = std::abs(pa.x - pb.x);
      du = std::min(du, width - du);
      // The projection bends most where the segment passes the camera.
      const double near = std::max(geom::point_segment_distance(pose.position, s), min_range);
      const double bend = s.length() / near * width / kTwoPi;
      const int pieces = std::max(1, static_cast<int>(std::ceil(std::max({du, std::abs(pa.y - pb.y), bend}))));
      const bool last = i + 1 == line.segment_count();
      for (int k = 0; k < pieces + (last ? 1 : 0); ++k) {
        const geom::Point2 g = s.a + (static_cast<double>(k) / pieces) * (s.b - s.a);
        if (keep(g)) out.push_back(g);
      }
    }
  return out;
}

// Chessboard distance to the nearest set pixel (INT_MAX/2 without any).
inline Raster<int> chessboard_distance(const Mask& edges) {
  const int w = edges.width(), h = edges.height();
  const int inf = INT_MAX / 2;
  Raster<int> d(w, h, inf);
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i]) d[i] = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      int v = d(c, r);
      if (c > 0) v = std::min(v, d(c - 1, r) + 1);
      if (r > 0) {
        v = std::min(v, d(c, r - 1) + 1);
        if (c > 0) v = std::min(v, d(c - 1, r - 1) + 1);
        if (c + 1 < w) v = std::min(v, d(c + 1, r - 1) + 1);
      }
      d(c, r) = v;
    }
  for (int r = h - 1; r >= 0; --r)
    for (int c = w - 1; c >= 0; --c) {
      int v = d(c, r);
      if (c + 1 < w) v = std::min(v, d(c + 1, r) + 1);
      if (r + 1 < h) {
        v = std::min(v, d(c, r + 1) + 1);
        if (c + 1 < w) v = std::min(v, d(c + 1, r + 1) + 1);
        if (c > 0) v = std::min(v, d(c - 1, r + 1) + 1);
      }
      d(c, r) = v;
    }
  return d;
}

// Samples whose pixel lies within `tol` (chessboard) of an edge pixel.
inline int count_inliers(const std::vector<geom::Point2>& samples, const CameraPose& pose, const Raster<int>& dist,
                         int tol) {
  const int w = dist.width(), h = dist.height();
  int n = 0;
  for (const auto& g : samples) {
    const geom::Point2 uv = panorama_coords(g.x - pose.position.x, g.y - pose.position.y, pose.height, pose.heading, w, h);
    int c = static_cast<int>(std::floor(uv.x));
    if (c >= w) c -= w;
    const int r = std::min(h - 1, static_cast<int>(std::floor(uv.y)));
    if (dist(c, r) <= tol) ++n;
  }
  return n;
}

struct FineResult {
  geom::Point2 displacement;
  int inliers = 0;
  int samples = 0;
};

// Exhaustive search of x, y displacements around pose0 (height fixed) for
// the most curb samples near an edge. Ties go to the smallest displacement,
// then to the lexicographically smaller (dx, dy).
inline FineResult fine_align(const CameraPose& pose0, const std::vector<geom::Polyline>& curbs, const Mask& edge_map,
                             const AlignConfig& cfg) {
  cfg.validate();
  require(edge_map.height() > 0 && edge_map.width() == 2 * edge_map.height(), "edge map must be 2:1 equirectangular");
  const std::vector<geom::Point2> samples =
      curb_samples(curbs, pose0, edge_map.width(), edge_map.height(), cfg.curb_min_range, cfg.curb_max_range);
  const Raster<int> dist = chessboard_distance(edge_map);
  const int n = cfg.fine_half_steps();
  FineResult best{{0.0, 0.0}, -1, static_cast<int>(samples.size())};
  long best_r2 = 0;
  int best_i = 0, best_j = 0;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      CameraPose pose = pose0;
      pose.position = pose0.position + geom::Point2{i * cfg.fine_step, j * cfg.fine_step};
      const int k = count_inliers(samples, pose, dist, cfg.inlier_px);
      const long r2 = static_cast<long>(i) * i + static_cast<long>(j) * j;
      const bool take = k > best.inliers ||
                        (k == best.inliers && (r2 < best_r2 || (r2 == best_r2 && std::tie(i, j) < std::tie(best_i, best_j))));
      if (take) {
        best.inliers = k;
        best.displacement = {i * cfg.fine_step, j * cfg.fine_step};
        best_r2 = r2, best_i = i, best_j = j;
      }
    }
  return best;
}

}  // namespace urbanbench::align
