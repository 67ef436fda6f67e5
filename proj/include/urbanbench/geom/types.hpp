#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "urbanbench/core/error.hpp"

namespace urbanbench::geom {

// Projected map coordinates in meters: x grows east, y grows north.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
  friend auto operator<=>(Point2 a, Point2 b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline double dist2(Point2 a, Point2 b) {
  const Point2 d = a - b;
  return dot(d, d);
}
inline bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Orientation of c relative to the directed line a->b (>0: left).
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

struct Segment {
  Point2 a;
  Point2 b;

  Point2 midpoint() const { return 0.5 * (a + b); }
  double length() const { return dist(a, b); }
  Point2 direction() const { return b - a; }
};

// Parameter in [0,1] of the point on [a,b] closest to p.
inline double project_param(Point2 p, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return 0.0;
  return std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
}

inline Point2 closest_point(Point2 p, const Segment& s) {
  return s.a + project_param(p, s) * (s.b - s.a);
}

inline double point_segment_distance(Point2 p, const Segment& s) {
  return dist(p, closest_point(p, s));
}

inline bool on_segment(Point2 p, const Segment& s) {
  return std::min(s.a.x, s.b.x) <= p.x && p.x <= std::max(s.a.x, s.b.x) &&
         std::min(s.a.y, s.b.y) <= p.y && p.y <= std::max(s.a.y, s.b.y);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Closed-segment intersection test, exact for collinear overlaps.
inline bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = sign(orient(s.a, s.b, t.a));
  const int o2 = sign(orient(s.a, s.b, t.b));
  const int o3 = sign(orient(t.a, t.b, s.a));
  const int o4 = sign(orient(t.a, t.b, s.b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(t.a, s)) return true;
  if (o2 == 0 && on_segment(t.b, s)) return true;
  if (o3 == 0 && on_segment(s.a, t)) return true;
  if (o4 == 0 && on_segment(s.b, t)) return true;
  return false;
}

// Acute angle in [0, pi/2] between the undirected lines through two segments.
inline double line_angle(const Segment& s, const Segment& t) {
  const Point2 u = s.direction();
  const Point2 v = t.direction();
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = std::clamp(std::abs(dot(u, v)) / (nu * nv), 0.0, 1.0);
  return std::acos(c);
}

namespace detail {

inline std::vector<Point2> drop_consecutive_duplicates(std::vector<Point2> pts) {
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

// Open chain of at least two distinct consecutive vertices.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Point2> vertices)
      : vertices_(detail::drop_consecutive_duplicates(std::move(vertices))) {
    for (const auto& p : vertices_) require(finite(p), "polyline vertex is not finite");
    require(vertices_.size() >= 2, "polyline needs at least two distinct vertices",
            ErrorCode::kDegenerate);
  }

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  Point2 front() const { return vertices_.front(); }
  Point2 back() const { return vertices_.back(); }
  bool closed() const { return vertices_.size() > 2 && vertices_.front() == vertices_.back(); }

  std::size_t segment_count() const { return vertices_.size() - 1; }
  Segment segment(std::size_t i) const { return {vertices_[i], vertices_[i + 1]}; }

  double length() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) total += dist(vertices_[i], vertices_[i + 1]);
    return total;
  }

  friend bool operator==(const Polyline&, const Polyline&) = default;

 private:
  std::vector<Point2> vertices_;
};

// Twice the signed shoelace area (positive for counter-clockwise rings).
inline double signed_area2(const std::vector<Point2>& ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(ring[i], ring[(i + 1) % n]);
  return a;
}

// Closed ring, stored counter-clockwise without a repeated closing vertex.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2> ring) : ring_(detail::drop_consecutive_duplicates(std::move(ring))) {
    while (ring_.size() > 1 && ring_.front() == ring_.back()) ring_.pop_back();
    for (const auto& p : ring_) require(finite(p), "polygon vertex is not finite");
    require(ring_.size() >= 3, "polygon needs at least three distinct vertices",
            ErrorCode::kDegenerate);
    const double a2 = signed_area2(ring_);
    require(a2 != 0.0, "polygon has zero area", ErrorCode::kDegenerate);
    if (a2 < 0.0) std::reverse(ring_.begin(), ring_.end());
  }

  const std::vector<Point2>& ring() const noexcept { return ring_; }
  std::size_t size() const noexcept { return ring_.size(); }
  const Point2& operator[](std::size_t i) const { return ring_[i]; }
  Segment edge(std::size_t i) const { return {ring_[i], ring_[(i + 1) % ring_.size()]}; }

  double area() const { return 0.5 * signed_area2(ring_); }

  double perimeter() const {
    double total = 0.0;
    for (std::size_t i = 0; i < ring_.size(); ++i) total += edge(i).length();
    return total;
  }

  // Area centroid.
  Point2 centroid() const {
    double cx = 0.0, cy = 0.0;
    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = ring_[i], q = ring_[(i + 1) % n];
      const double c = cross(p, q);
      cx += (p.x + q.x) * c;
      cy += (p.y + q.y) * c;
    }
    const double a6 = 3.0 * signed_area2(ring_);
    return {cx / a6, cy / a6};
  }

  // O(n^2) check that no two edges meet except consecutive ones at their shared vertex.
  bool is_simple() const {
    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Segment ei = edge(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const Segment ej = edge(j);
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        if (adjacent) {
          // Consecutive edges may only share the common vertex: reject folding back.
          const Point2 shared = (j == i + 1) ? ei.b : ei.a;
          const Point2 p = (j == i + 1) ? ei.a : ei.b;
          const Point2 q = (j == i + 1) ? ej.b : ej.a;
          if (orient(p, shared, q) == 0.0 && dot(p - shared, q - shared) > 0.0) return false;
          continue;
        }
        if (segments_intersect(ei, ej)) return false;
      }
    }
    return true;
  }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point2> ring_;
};

inline Polygon translated(const Polygon& p, Point2 d) {
  std::vector<Point2> r;
  r.reserve(p.size());
  for (const auto& v : p.ring()) r.push_back(v + d);
  return Polygon(std::move(r));
}

inline Polygon transformed(const Polygon& p, double scale, double angle, Point2 d) {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<Point2> r;
  r.reserve(p.size());
  for (const auto& v : p.ring()) r.push_back({scale * (c * v.x - s * v.y) + d.x, scale * (s * v.x + c * v.y) + d.y});
  return Polygon(std::move(r));
}

inline Polygon rectangle(Point2 lo, Point2 hi) {
  return Polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

inline Polygon regular_polygon(int n, double radius, Point2 center = {}, double phase = 0.0) {
  std::vector<Point2> r;
  for (int k = 0; k < n; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / n;
    r.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return Polygon(std::move(r));
}

// Even-odd point-in-ring test (pixel-center convention: half-open in y).
inline bool point_in_ring(Point2 p, const std::vector<Point2>& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[j], b = ring[i];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

// Axis-aligned geo-referenced pixel grid. `origin` is the lower-left corner
// of pixel (0, height-1); pixel rows count downward from the north edge.
struct GeoGrid {
  Point2 origin;
  double resolution = 0.1;
  int width = 0;
  int height = 0;

  void validate() const {
    require(resolution > 0.0 && std::isfinite(resolution), "grid resolution must be positive");
    require(width >= 0 && height >= 0, "grid dimensions must be non-negative");
    require(finite(origin), "grid origin must be finite");
  }

  double min_x() const { return origin.x; }
  double min_y() const { return origin.y; }
  double max_x() const { return origin.x + width * resolution; }
  double max_y() const { return origin.y + height * resolution; }

  Point2 pixel_center(int col, int row) const {
    return {origin.x + (col + 0.5) * resolution, origin.y + (height - row - 0.5) * resolution};
  }

  Point2 pixel_corner(double col, double row) const {
    return {origin.x + col * resolution, origin.y + (height - row) * resolution};
  }

  // Continuous pixel coordinates; integer values are pixel corners.
  Point2 to_pixel(Point2 p) const {
    return {(p.x - origin.x) / resolution, height - (p.y - origin.y) / resolution};
  }

  // Index of the pixel containing p (may be outside the grid).
  std::pair<int, int> pixel_of(Point2 p) const {
    const Point2 f = to_pixel(p);
    return {static_cast<int>(std::floor(f.x)), static_cast<int>(std::floor(f.y))};
  }

  bool contains(Point2 p) const {
    return p.x >= min_x() && p.x < max_x() && p.y >= min_y() && p.y < max_y();
  }

  friend bool operator==(const GeoGrid&, const GeoGrid&) = default;
};

}  // namespace urbanbench::geom
