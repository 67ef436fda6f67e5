#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "urbanbench/core/error.hpp"
#include "urbanbench/core/raster.hpp"

namespace urbanbench::align {

enum class EdgeMethod { kGradient, kPassthrough };

struct EdgeOptions {
  EdgeMethod method = EdgeMethod::kGradient;
  double quantile = 0.95;  // gradient magnitudes above this quantile are candidates
  double smooth_sigma = 0.0;  // Gaussian pre-smoothing in pixels, 0 = off
  bool wrap_columns = false;

  void validate() const {
    require(quantile >= 0.0 && quantile < 1.0, "edge quantile must be in [0, 1)", ErrorCode::kConfig);
    require(smooth_sigma >= 0.0, "smoothing sigma must be non-negative", ErrorCode::kConfig);
  }
};

// Binary edge raster. Gradient mode: central-difference magnitude above the
// configured quantile, thinned by non-maximum suppression along the
// quantized gradient direction. Passthrough mode binarizes the input as is.
template <typename T>
Mask edge_map(const Raster<T>& img, const EdgeOptions& opt = {}) {
  opt.validate();
  const int w = img.width(), h = img.height();
  Mask out(w, h, 0);
  if (opt.method == EdgeMethod::kPassthrough) {
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] != T{} ? 1 : 0;
    return out;
  }
  if (w == 0 || h == 0) return out;
  auto col = [&](int c) {
    if (opt.wrap_columns) return (c % w + w) % w;
    return std::clamp(c, 0, w - 1);
  };
  Image src(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) src[i] = static_cast<double>(img[i]);
  if (opt.smooth_sigma > 0.0) {
    // Separable Gaussian, truncated at 3 sigma.
    const int rad = static_cast<int>(std::ceil(3.0 * opt.smooth_sigma));
    std::vector<double> k(2 * rad + 1);
    double ksum = 0.0;
    for (int i = -rad; i <= rad; ++i) ksum += k[i + rad] = std::exp(-0.5 * i * i / (opt.smooth_sigma * opt.smooth_sigma));
    for (auto& v : k) v /= ksum;
    Image tmp(w, h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int i = -rad; i <= rad; ++i) acc += k[i + rad] * src(col(c + i), r);
        tmp(c, r) = acc;
      }
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int i = -rad; i <= rad; ++i) acc += k[i + rad] * tmp(c, std::clamp(r + i, 0, h - 1));
        src(c, r) = acc;
      }
  }
  Image gx(w, h), gy(w, h), mag(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double dx = 0.5 * (src(col(c + 1), r) - src(col(c - 1), r));
      const double dy = 0.5 * (src(c, std::min(r + 1, h - 1)) - src(c, std::max(r - 1, 0)));
      gx(c, r) = dx, gy(c, r) = dy, mag(c, r) = std::hypot(dx, dy);
    }
  std::vector<double> sorted = mag.data();
  const auto k = static_cast<std::size_t>(std::floor(opt.quantile * static_cast<double>(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  const double thr = sorted[k];
  auto at = [&](int c, int r) {
    if (r < 0 || r >= h) return 0.0;
    if (!opt.wrap_columns && (c < 0 || c >= w)) return 0.0;
    return mag(col(c), r);
  };
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double m = mag(c, r);
      if (!(m > thr) || m <= 0.0) continue;
      // Quantize the gradient direction to one of four neighbour axes.
      const double a = std::atan2(gy(c, r), gx(c, r));
      int oc = 1, orow = 0;
      const double t = std::abs(std::tan(a));
      if (t > 2.414213562373095) {
        oc = 0, orow = 1;
      } else if (t >= 0.4142135623730951) {
        oc = 1, orow = (gx(c, r) * gy(c, r) > 0) ? 1 : -1;
      }
      // Strict on the leading side so a two-pixel plateau keeps one pixel.
      if (m > at(c - oc, r - orow) && m >= at(c + oc, r + orow)) out(c, r) = 1;
    }
  return out;
}

}  // namespace urbanbench::align
