#pragma once

#include <cmath>
#include <vector>

#include "urbanbench/geom/types.hpp"

namespace urbanbench::geom {

// Samples the polyline every `step` meters of arc length starting at the
// first vertex. The last sample is always the final vertex; it is appended
// as an extra, shorter interval when the length is not a multiple of step.
inline std::vector<Point2> discretize(const Polyline& line, double step) {
  require(step > 0.0 && std::isfinite(step), "discretize step must be positive");
  const auto& v = line.vertices();
  const double total = line.length();
  // Relative slack so that lengths like 1.0 / 0.1 count as exact multiples.
  const double slack = 1e-9 * std::max(1.0, total / step);
  const auto full = static_cast<long>(std::floor(total / step + slack));

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(full) + 2);

  std::size_t seg = 0;
  double seg_start = 0.0;
  double seg_len = dist(v[0], v[1]);
  for (long k = 0; k <= full; ++k) {
    const double s = static_cast<double>(k) * step;
    while (seg + 2 < v.size() && s > seg_start + seg_len) {
      seg_start += seg_len;
      ++seg;
      seg_len = dist(v[seg], v[seg + 1]);
    }
    const double t = seg_len > 0.0 ? std::clamp((s - seg_start) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(v[seg] + t * (v[seg + 1] - v[seg]));
  }
  if (total - static_cast<double>(full) * step > slack * step) {
    out.push_back(v.back());
  } else {
    out.back() = v.back();
  }
  return out;
}

}  // namespace urbanbench::geom
