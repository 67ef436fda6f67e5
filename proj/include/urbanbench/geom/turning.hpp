#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "urbanbench/geom/types.hpp"

namespace urbanbench::geom {

// Cumulative heading of a closed boundary as a step function of normalized
// arc length. theta[i] holds on [s[i], s[i+1]) and the last entry on
// [s.back(), 1). Past s = 1 the function continues as theta(s-1) + total_turn.
struct TurningFunction {
  std::vector<double> s;
  std::vector<double> theta;
  double total_turn = 2.0 * std::numbers::pi;

  std::size_t size() const noexcept { return s.size(); }

  // Value at any s; arguments outside [0, 1) are wrapped with the winding offset.
  double operator()(double x) const {
    const double k = std::floor(x);
    const double r = x - k;
    auto it = std::upper_bound(s.begin(), s.end(), r);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - s.begin()) - 1));
    return theta[i] + k * total_turn;
  }
};

namespace detail {
inline double turn_angle(Point2 u, Point2 v) { return std::atan2(cross(u, v), dot(u, v)); }
}  // namespace detail

inline TurningFunction turning_function(const Polygon& poly) {
  require(poly.is_simple(), "turning function needs a simple polygon", ErrorCode::kDegenerate);
  const auto& r = poly.ring();
  const std::size_t n = r.size();
  const double perimeter = poly.perimeter();

  TurningFunction tf;
  Point2 prev = r[1] - r[0];
  double heading = std::atan2(prev.y, prev.x);
  double arc = dist(r[0], r[1]);
  tf.s.push_back(0.0);
  tf.theta.push_back(heading);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const Point2 e = r[(i + 1) % n] - r[i % n];
    const double turn = detail::turn_angle(prev, e);
    total += turn;
    prev = e;
    if (i == n) break;
    heading += turn;
    if (std::abs(turn) > 1e-12) {
      tf.s.push_back(arc / perimeter);
      tf.theta.push_back(heading);
    } else {
      tf.theta.back() = heading;
    }
    arc += norm(e);
  }
  tf.total_turn = total;
  return tf;
}

namespace detail {

// min over theta of the squared L2 distance for one fixed cyclic shift.
inline double shifted_l2(const TurningFunction& a, const TurningFunction& b, double t) {
  std::vector<double> cuts;
  cuts.reserve(a.size() + b.size() + 2);
  cuts.push_back(0.0);
  for (double sa : a.s) {
    double u = sa - t;
    u -= std::floor(u);
    if (u < 1.0) cuts.push_back(u);
  }
  for (double sb : b.s) cuts.push_back(sb);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());

  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const double f = a(mid + t) - b(mid);
    sum += len * f;
    sum2 += len * f * f;
  }
  return std::max(0.0, sum2 - sum * sum);
}

}  // namespace detail

// L2 distance between turning functions minimized over a cyclic start shift
// and a constant rotation offset. Between consecutive critical shifts (where
// a breakpoint of one function meets a breakpoint of the other) the objective
// is concave in the shift, so evaluating the critical shifts is exact.
inline double turning_distance(const TurningFunction& a, const TurningFunction& b) {
  double best = std::numeric_limits<double>::infinity();
  for (double sa : a.s)
    for (double sb : b.s) {
      double t = sa - sb;
      t -= std::floor(t);
      best = std::min(best, detail::shifted_l2(a, b, t));
    }
  return std::sqrt(best);
}

}  // namespace urbanbench::geom
