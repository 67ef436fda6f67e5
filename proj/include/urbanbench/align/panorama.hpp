#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "urbanbench/core/error.hpp"
#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::align {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Full-sphere equirectangular intensity image. Column u spans azimuth
// [0, 2pi) clockwise from the camera heading; row v spans [up, down].
struct Panorama {
  ImageF pixels;
  geom::Point2 reported_position;
  double heading = 0.0;  // radians clockwise from north
  double nominal_height = 2.5;

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }

  void validate() const {
    require(pixels.height() > 0 && pixels.width() == 2 * pixels.height(), "panorama must be 2:1 equirectangular");
    require(heading >= 0.0 && heading < kTwoPi, "heading must lie in [0, 2pi)");
    require(nominal_height > 0.0, "camera height must be positive");
  }
};

struct CameraPose {
  geom::Point2 position;
  double height = 2.5;
  double heading = 0.0;
};

struct AlignConfig {
  double search_xy = 10.0;
  double search_z_min = 2.2;
  double search_z_max = 2.6;
  double step = 0.1;
  double sigma_x = 2.0;
  double sigma_y = 2.0;
  double sigma_z = 0.2;
  double z_mean = 2.5;
  double lambda = 0.3;
  double fine_window = 1.0;
  double fine_step = 0.05;
  int inlier_px = 3;
  double rectified_extent = 40.0;
  double rectified_res = 0.1;
  double curb_min_range = 0.5;
  double curb_max_range = 20.0;

  static bool divides(double window, double step) {
    const double k = window / step;
    return std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k);
  }

  int xy_half_steps() const { return static_cast<int>(std::lround(search_xy / step)); }
  int z_steps() const { return static_cast<int>(std::lround((search_z_max - search_z_min) / step)) + 1; }
  int fine_half_steps() const { return static_cast<int>(std::lround(fine_window / fine_step)); }
  int rectified_pixels() const { return static_cast<int>(std::lround(rectified_extent / rectified_res)); }
  double z_at(int k) const { return search_z_min + k * step; }

  void validate() const {
    for (double v : {step, sigma_x, sigma_y, sigma_z, fine_step, rectified_extent, rectified_res, z_mean})
      require(std::isfinite(v) && v > 0.0, "alignment parameters must be positive", ErrorCode::kConfig);
    require(search_xy >= 0.0 && fine_window >= 0.0 && lambda >= 0.0 && inlier_px >= 0,
            "search windows, lambda and inlier tolerance must be non-negative", ErrorCode::kConfig);
    require(search_z_max >= search_z_min && search_z_min > 0.0, "bad camera height range", ErrorCode::kConfig);
    require(divides(search_xy, step) && divides(search_z_max - search_z_min, step) && divides(fine_window, fine_step),
            "steps must divide the search windows", ErrorCode::kConfig);
    require(divides(rectified_extent, rectified_res), "rectified resolution must divide the extent", ErrorCode::kConfig);
    require(divides(step, rectified_res), "search step must be a multiple of the rectified resolution",
            ErrorCode::kConfig);
    require(curb_min_range >= 0.0 && curb_max_range > curb_min_range, "bad curb range", ErrorCode::kConfig);
  }

  double prior(double x, double y, double z) const {
    return std::exp(-prior_distance(x, y, z));
  }
  double prior_distance(double x, double y, double z) const {
    return x * x / (sigma_x * sigma_x) + y * y / (sigma_y * sigma_y) + (z - z_mean) * (z - z_mean) / (sigma_z * sigma_z);
  }
};

struct PoseHypothesis {
  double x = 0.0;
  double y = 0.0;
  double z = 2.5;
  double ncc = 0.0;
  double prior = 0.0;
  double total = 0.0;
  std::optional<int> fine_inliers;
};

}  // namespace urbanbench::align
