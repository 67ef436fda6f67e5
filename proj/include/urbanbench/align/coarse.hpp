#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "urbanbench/align/ncc.hpp"
#include "urbanbench/align/panorama.hpp"
#include "urbanbench/align/rectify.hpp"

namespace urbanbench::align {

// NCC over the whole (x, y) window for one camera height.
struct HeightScores {
  double z = 0.0;
  ScoreMap map;  // whole-pixel offsets of the aerial lattice
};

// Rectifies the panorama at each hypothesized camera height and scores it
// against the aerial around the reported position. The rectified grid is
// moved by under half a pixel so that its pixel centers land on the aerial
// lattice; offsets are then whole aerial pixels.
template <typename T>
std::vector<HeightScores> coarse_scores(const Panorama& p, const Raster<T>& aerial, const geom::GeoGrid& aerial_grid,
                                        const AlignConfig& cfg, NccMethod method = NccMethod::kFft) {
  cfg.validate();
  p.validate();
  const double res = aerial_grid.resolution;
  require(std::abs(res - cfg.rectified_res) <= 1e-9 * res, "aerial resolution must equal the rectified resolution");
  const double half = 0.5 * cfg.rectified_extent;
  const geom::Point2 want{p.reported_position.x - half, p.reported_position.y - half};
  const geom::Point2 snapped{aerial_grid.origin.x + std::round((want.x - aerial_grid.origin.x) / res) * res,
                             aerial_grid.origin.y + std::round((want.y - aerial_grid.origin.y) / res) * res};
  const geom::Point2 shift = snapped - want;
  const int half_px = static_cast<int>(std::lround(cfg.search_xy / res));

  std::vector<HeightScores> out;
  for (int k = 0; k < cfg.z_steps(); ++k) {
    const double z = cfg.z_at(k);
    const Rectified rect = rectify_panorama(p, z, cfg, shift);
    geom::GeoGrid world = rect.grid;
    world.origin = snapped;
    out.push_back({z, ncc_score_map(rect.image, world, aerial, aerial_grid, half_px, method)});
  }
  return out;
}

// Exhaustive maximizer of ncc + lambda * prior over the search grid. Ties go
// to the smaller prior distance, then to the lexicographically smaller
// (x, y, z).
inline PoseHypothesis best_hypothesis(const std::vector<HeightScores>& scores, const AlignConfig& cfg) {
  PoseHypothesis best;
  bool have = false;
  double best_d = 0.0;
  for (const auto& hs : scores) {
    const ScoreMap& m = hs.map;
    const int stride = static_cast<int>(std::lround(cfg.step / m.resolution));
    const int n = m.half / stride;
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const double x = i * cfg.step, y = j * cfg.step;
        const double s = m.at(i * stride, j * stride);
        const double pr = cfg.prior(x, y, hs.z);
        const double total = s + cfg.lambda * pr;
        const double d = cfg.prior_distance(x, y, hs.z);
        bool take = !have || total > best.total;
        if (have && total == best.total)
          take = d < best_d || (d == best_d && std::tie(x, y, hs.z) < std::tie(best.x, best.y, best.z));
        if (take) {
          best = {x, y, hs.z, s, pr, total, std::nullopt};
          best_d = d;
          have = true;
        }
      }
  }
  require(have, "empty search grid");
  return best;
}

template <typename T>
PoseHypothesis coarse_align(const Panorama& p, const Raster<T>& aerial, const geom::GeoGrid& aerial_grid,
                            const AlignConfig& cfg, NccMethod method = NccMethod::kFft) {
  return best_hypothesis(coarse_scores(p, aerial, aerial_grid, cfg, method), cfg);
}

}  // namespace urbanbench::align
