#pragma once

#include <utility>
#include <vector>

#include "urbanbench/geom/types.hpp"

namespace urbanbench::geom {

namespace detail {

// Marks the vertices of pts[first..last] (indices taken modulo pts.size())
// that Ramer-Douglas-Peucker keeps. Distances are measured to the chord
// segment, so a closed half whose chord degenerates to a point still works.
inline void rdp_mark(const std::vector<Point2>& pts, std::size_t first, std::size_t last,
                     double epsilon, std::vector<char>& keep) {
  const std::size_t n = pts.size();
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    const Segment chord{pts[lo % n], pts[hi % n]};
    double best = -1.0;
    std::size_t arg = lo;
    for (std::size_t k = lo + 1; k < hi; ++k) {
      const double d = point_segment_distance(pts[k % n], chord);
      if (d > best) {
        best = d;
        arg = k;
      }
    }
    if (best > epsilon) {
      keep[arg % n] = 1;
      stack.push_back({arg, hi});
      stack.push_back({lo, arg});
    }
  }
}

}  // namespace detail

inline Polyline rdp_simplify(const Polyline& line, double epsilon) {
  require(epsilon >= 0.0, "rdp epsilon must be non-negative");
  if (epsilon == 0.0) return line;
  const auto& pts = line.vertices();
  std::vector<char> keep(pts.size(), 0);
  keep[0] = 1;
  keep[pts.size() - 1] = 1;
  detail::rdp_mark(pts, 0, pts.size() - 1, epsilon, keep);
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return Polyline(std::move(out));
}

// Closed-ring variant. The ring is split at its diameter pair (the first pair
// of vertices at maximal mutual distance), both halves are simplified
// independently, and survivors keep their original ring order. The diameter
// pair is preserved by simplification, which makes the operation idempotent.
inline Polygon rdp_simplify(const Polygon& poly, double epsilon) {
  require(epsilon >= 0.0, "rdp epsilon must be non-negative");
  if (epsilon == 0.0) return poly;
  const auto& pts = poly.ring();
  const std::size_t n = pts.size();

  std::size_t ai = 0, aj = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (const double d = dist2(pts[i], pts[j]); d > best) {
        best = d;
        ai = i;
        aj = j;
      }

  std::vector<char> keep(n, 0);
  keep[ai] = keep[aj] = 1;
  detail::rdp_mark(pts, ai, aj, epsilon, keep);
  detail::rdp_mark(pts, aj, ai + n, epsilon, keep);

  std::size_t kept = 0;
  for (char k : keep) kept += k ? 1 : 0;
  if (kept < 3) {
    // Everything collapsed onto the diameter: retain the vertex farthest from it.
    const Segment chord{pts[ai], pts[aj]};
    double far = -1.0;
    std::size_t arg = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (keep[k]) continue;
      if (const double d = point_segment_distance(pts[k], chord); d > far) {
        far = d;
        arg = k;
      }
    }
    require(arg < n && far > 0.0, "polygon collapses under simplification", ErrorCode::kDegenerate);
    keep[arg] = 1;
  }

  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(pts[i]);
  return Polygon(std::move(out));
}

}  // namespace urbanbench::geom
