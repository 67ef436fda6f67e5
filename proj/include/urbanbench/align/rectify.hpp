#pragma once

#include <algorithm>
#include <cmath>

#include "urbanbench/align/panorama.hpp"

namespace urbanbench::align {

// Bilinear lookup at continuous pixel coordinates (pixel centers sit at
// k + 0.5). Columns wrap around, rows clamp.
inline double sample_panorama(const ImageF& img, double u, double v) {
  const int w = img.width(), h = img.height();
  const double x = u - 0.5, y = std::clamp(v - 0.5, 0.0, static_cast<double>(h - 1));
  const double fx = std::floor(x), fy = std::floor(y);
  const double tx = x - fx, ty = y - fy;
  int c0 = static_cast<int>(fx) % w;
  if (c0 < 0) c0 += w;
  const int c1 = (c0 + 1) % w;
  const int r0 = static_cast<int>(fy), r1 = std::min(r0 + 1, h - 1);
  const double a = img(c0, r0), b = img(c1, r0), c = img(c0, r1), d = img(c1, r1);
  return (a + (b - a) * tx) * (1.0 - ty) + (c + (d - c) * tx) * ty;
}

// Continuous panorama coordinates of the ground point at offset (dx, dy)
// from a camera at height z.
inline geom::Point2 panorama_coords(double dx, double dy, double z, double heading, int w, int h) {
  double phi = std::fmod(std::atan2(dx, dy) - heading, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  const double theta = std::atan2(z, std::hypot(dx, dy));
  return {w * phi / kTwoPi, h * (0.5 + theta / std::numbers::pi)};
}

struct Rectified {
  Image image;         // intensities rescaled to [0, 1] unless flat
  geom::GeoGrid grid;  // camera-relative ground coordinates
};

// Projects the panorama onto the ground plane for camera height h. The grid
// covers [-E/2, E/2]^2 around the camera, moved by `shift` (used to land the
// pixel centers on an aerial lattice).
inline Rectified rectify_panorama(const Panorama& p, double h, const AlignConfig& cfg, geom::Point2 shift = {}) {
  p.validate();
  require(h > 0.0 && std::isfinite(h), "camera height must be positive");
  const int n = cfg.rectified_pixels();
  const double half = 0.5 * cfg.rectified_extent;
  Rectified out{Image(n, n), geom::GeoGrid{{-half + shift.x, -half + shift.y}, cfg.rectified_res, n, n}};
  const int w = p.width(), hp = p.height();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const geom::Point2 g = out.grid.pixel_center(c, r);
      const geom::Point2 uv = panorama_coords(g.x, g.y, h, p.heading, w, hp);
      out.image(c, r) = sample_panorama(p.pixels, uv.x, uv.y);
    }
  const auto [lo, hi] = std::minmax_element(out.image.data().begin(), out.image.data().end());
  const double a = *lo, span = *hi - *lo;
  // A flat view stays as it is.
  if (span > 0.0)
    for (auto& v : out.image.data()) v = (v - a) / span;
  return out;
}

}  // namespace urbanbench::align
