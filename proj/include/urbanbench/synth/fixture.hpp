#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "urbanbench/align/panorama.hpp"
#include "urbanbench/core/error.hpp"
#include "urbanbench/core/vector_map.hpp"
#include "urbanbench/synth/render.hpp"

namespace urbanbench::synth {

struct FixtureOptions {
  std::uint64_t seed = 1;
  int pano_height = 1600;       // width is twice this
  double offset_sigma = 1.5;    // per axis, meters
  double offset_max = 5.0;      // draws beyond this radius are redrawn
  std::optional<geom::Point2> planted;  // fixed offset instead of a draw
  double noise_sigma = 0.02;
  double occluder_fraction = 0.2;  // of the image below the horizon
  double aerial_extent = 80.0;
  double aerial_res = 0.1;
  double max_range = 35.0;  // ground farther than this renders as haze
  double source_res = 0.05;  // resolution of the texture the view is rendered from
  double haze = 0.5;
  double sky = 0.85;
  int supersample = 2;
  RenderOptions render;

  void validate() const {
    require(pano_height > 0, "panorama height must be positive", ErrorCode::kConfig);
    require(offset_sigma >= 0.0 && offset_max >= 0.0, "bad offset noise", ErrorCode::kConfig);
    require(noise_sigma >= 0.0, "noise sigma must be non-negative", ErrorCode::kConfig);
    require(occluder_fraction >= 0.0 && occluder_fraction < 1.0, "occluder fraction must be in [0, 1)", ErrorCode::kConfig);
    require(aerial_extent > 0.0 && aerial_res > 0.0 && source_res > 0.0 && max_range > 0.0 && supersample >= 1,
            "bad fixture geometry", ErrorCode::kConfig);
  }
};

struct PanoramaFixture {
  align::Panorama panorama;  // carries the reported position
  AerialTile aerial;         // centered on the reported position
  align::CameraPose true_pose;
  geom::Point2 planted;  // true - reported
};

inline bool on_road(const VectorMap& map, geom::Point2 p) {
  if (!map.road_outer || !geom::point_in_ring(p, map.road_outer->ring())) return false;
  return std::none_of(map.blocks.begin(), map.blocks.end(),
                      [&](const MapBlock& b) { return geom::point_in_ring(p, b.boundary.ring()); });
}

// Pose in a driving lane (a quarter of the road width off the centerline)
// a few meters from an intersection, at least `margin` from the map
// border, with a uniformly random heading.
inline align::CameraPose sample_road_pose(const VectorMap& map, std::mt19937_64& rng, double margin = 50.0,
                                          double camera_height = 2.5) {
  require(!map.centerlines.empty(), "map has no centerlines");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const auto& cl = map.centerlines[static_cast<std::size_t>(unit(rng) * map.centerlines.size()) % map.centerlines.size()];
    const double len = cl.line.length();
    double s = std::min(4.0 + 11.0 * unit(rng), 0.5 * len);
    if (unit(rng) < 0.5) s = len - s;
    const double width = cl.width > 0.0 ? cl.width : 8.0;
    const double lateral = (unit(rng) < 0.5 ? -0.25 : 0.25) * width + (unit(rng) - 0.5) * 0.6;
    const double heading = std::min(unit(rng), 1.0 - 1e-12) * align::kTwoPi;
    double acc = 0.0;
    geom::Point2 p, dir{1.0, 0.0};
    for (std::size_t i = 0; i < cl.line.segment_count(); ++i) {
      const auto seg = cl.line.segment(i);
      const double l = seg.length();
      if (acc + l >= s || i + 1 == cl.line.segment_count()) {
        dir = (1.0 / l) * seg.direction();
        p = seg.a + std::clamp(s - acc, 0.0, l) * dir;
        break;
      }
      acc += l;
    }
    p = p + lateral * geom::Point2{-dir.y, dir.x};
    if (p.x < map.origin.x + margin || p.y < map.origin.y + margin || p.x > map.origin.x + map.extent_x - margin ||
        p.y > map.origin.y + map.extent_y - margin || !on_road(map, p))
      continue;
    return {p, camera_height, heading};
  }
  fail(ErrorCode::kDegenerate, "no road pose found inside the margin");
}

// Ground view of the textured plane from the true pose, plus an aerial crop
// around the reported pose (true pose minus the planted offset).
inline PanoramaFixture make_panorama_fixture(const VectorMap& map, const align::CameraPose& true_pose,
                                             const FixtureOptions& opt = {}) {
  opt.validate();
  require(true_pose.height > 0.0, "camera height must be positive");
  require(true_pose.heading >= 0.0 && true_pose.heading < align::kTwoPi, "heading must lie in [0, 2pi)");
  const geom::Point2 tp = true_pose.position;
  require(tp.x >= map.origin.x && tp.y >= map.origin.y && tp.x <= map.origin.x + map.extent_x &&
              tp.y <= map.origin.y + map.extent_y,
          "pose lies off the map");
  require(!map.road_outer || on_road(map, tp), "pose is not on a road");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  geom::Point2 planted;
  if (opt.planted) {
    planted = *opt.planted;
  } else if (opt.offset_sigma > 0.0) {
    do {
      planted = {opt.offset_sigma * gauss(rng), opt.offset_sigma * gauss(rng)};
    } while (geom::norm(planted) > opt.offset_max);
  }
  const geom::Point2 reported = tp - planted;

  const double res = opt.aerial_res;
  const int npx = static_cast<int>(std::lround(opt.aerial_extent / res));
  const geom::Point2 corner{map.origin.x + std::round((reported.x - 0.5 * opt.aerial_extent - map.origin.x) / res) * res,
                            map.origin.y + std::round((reported.y - 0.5 * opt.aerial_extent - map.origin.y) / res) * res};
  const geom::GeoGrid grid{corner, res, npx, npx};
  require(grid.min_x() >= map.origin.x && grid.min_y() >= map.origin.y &&
              grid.max_x() <= map.origin.x + map.extent_x + 1e-6 && grid.max_y() <= map.origin.y + map.extent_y + 1e-6,
          "pose lies off the map: aerial crop leaves the map extent");
  PanoramaFixture fx{{}, render_aerial(map, grid, opt.render), true_pose, planted};

  // Finer texture around the true pose for the ground view.
  const int spx = static_cast<int>(std::ceil(2.0 * opt.max_range / opt.source_res)) + 2;
  const geom::Point2 scorner{map.origin.x + std::floor((tp.x - 0.5 * spx * opt.source_res - map.origin.x) / opt.source_res) * opt.source_res,
                             map.origin.y + std::floor((tp.y - 0.5 * spx * opt.source_res - map.origin.y) / opt.source_res) * opt.source_res};
  geom::GeoGrid sgrid{scorner, opt.source_res, spx, spx};
  // Clip to the map; samples outside fall back to haze.
  const double sx0 = std::max(sgrid.min_x(), map.origin.x), sy0 = std::max(sgrid.min_y(), map.origin.y);
  const int c_skip = static_cast<int>(std::ceil((sx0 - sgrid.min_x()) / opt.source_res - 1e-9));
  const int r_skip = static_cast<int>(std::ceil((sy0 - sgrid.min_y()) / opt.source_res - 1e-9));
  sgrid.origin = {sgrid.origin.x + c_skip * opt.source_res, sgrid.origin.y + r_skip * opt.source_res};
  sgrid.width = std::min(spx - c_skip, static_cast<int>(std::floor((map.origin.x + map.extent_x - sgrid.origin.x) / opt.source_res + 1e-9)));
  sgrid.height = std::min(spx - r_skip, static_cast<int>(std::floor((map.origin.y + map.extent_y - sgrid.origin.y) / opt.source_res + 1e-9)));
  const ImageF src = render_aerial(map, sgrid, opt.render).image;

  const int H = opt.pano_height, W = 2 * H;
  ImageF pano(W, H, static_cast<float>(opt.sky));
  const int sw = sgrid.width, sh = sgrid.height;
  auto sample = [&](geom::Point2 g) {
    const geom::Point2 f = sgrid.to_pixel(g);
    const double x = f.x - 0.5, y = f.y - 0.5;
    if (x < 0.0 || y < 0.0 || x > sw - 1 || y > sh - 1) return opt.haze;
    const int c0 = std::min(static_cast<int>(x), sw - 2), r0 = std::min(static_cast<int>(y), sh - 2);
    const double tx = x - c0, ty = y - r0;
    const double a = src(c0, r0), b = src(c0 + 1, r0), c = src(c0, r0 + 1), d = src(c0 + 1, r0 + 1);
    return (a + (b - a) * tx) * (1.0 - ty) + (c + (d - c) * tx) * ty;
  };
  const int ss = opt.supersample;
  std::vector<double> sn(static_cast<std::size_t>(W) * ss), cs(sn.size());
  for (int u = 0; u < W * ss; ++u) {
    const double phi = align::kTwoPi * (u + 0.5) / (W * ss) + true_pose.heading;
    sn[u] = std::sin(phi), cs[u] = std::cos(phi);
  }
  for (int r = H / 2; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      double acc = 0.0;
      for (int sy = 0; sy < ss; ++sy) {
        const double theta = std::numbers::pi * ((r + (sy + 0.5) / ss) / H - 0.5);
        const double range = theta > 0.0 ? true_pose.height / std::tan(theta) : INFINITY;
        for (int sx = 0; sx < ss; ++sx) {
          if (range > opt.max_range) {
            acc += opt.haze;
            continue;
          }
          const int u = c * ss + sx;
          acc += sample({tp.x + range * sn[u], tp.y + range * cs[u]});
        }
      }
      pano(c, r) = static_cast<float>(acc / (ss * ss));
    }
  }

  // Occluders: flat gray boxes below the horizon until the target share of
  // that half is covered.
  const long below = static_cast<long>(W) * (H - H / 2);
  Mask covered(W, H, 0);
  long n_covered = 0;
  while (static_cast<double>(n_covered) < opt.occluder_fraction * below) {
    const int bw = static_cast<int>(W * (0.03 + 0.07 * unit(rng)));
    const int bh = static_cast<int>(H * (0.05 + 0.10 * unit(rng)));
    const int c0 = static_cast<int>(unit(rng) * W);
    const int r0 = H / 2 + static_cast<int>(unit(rng) * std::max(1, H - H / 2 - bh));
    const float gray = static_cast<float>(0.1 + 0.8 * unit(rng));
    for (int r = r0; r < std::min(H, r0 + bh); ++r)
      for (int k = 0; k < bw; ++k) {
        const int c = (c0 + k) % W;
        pano(c, r) = gray;
        if (!covered(c, r)) covered(c, r) = 1, ++n_covered;
      }
  }
  if (opt.noise_sigma > 0.0)
    for (auto& v : pano.data()) v = static_cast<float>(v + opt.noise_sigma * gauss(rng));

  fx.panorama = {std::move(pano), reported, true_pose.heading, 2.5};
  return fx;
}

}  // namespace urbanbench::synth
