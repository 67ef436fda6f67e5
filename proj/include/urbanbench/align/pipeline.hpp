#pragma once

#include <optional>
#include <vector>

#include "urbanbench/align/coarse.hpp"
#include "urbanbench/align/edges.hpp"
#include "urbanbench/align/fine.hpp"

namespace urbanbench::align {

// Edge settings for equirectangular views: the azimuth wraps and the
// smoothing suppresses texture so curb and marking edges dominate.
inline EdgeOptions panorama_edge_options() { return {EdgeMethod::kGradient, 0.995, 2.0, true}; }

// Curbs with any segment within `range` of `p`.
inline std::vector<geom::Polyline> curbs_near(const std::vector<geom::Polyline>& curbs, geom::Point2 p, double range) {
  std::vector<geom::Polyline> out;
  for (const auto& c : curbs)
    for (std::size_t i = 0; i < c.segment_count(); ++i)
      if (geom::point_segment_distance(p, c.segment(i)) < range) {
        out.push_back(c);
        break;
      }
  return out;
}

struct AlignResult {
  PoseHypothesis coarse;
  std::optional<FineResult> fine;
  CameraPose pose;  // final estimate
};

// Coarse search against the aerial raster, then, when curbs are given, the
// curb-edge refinement. `edges` replaces the computed edge map when set.
template <typename T>
AlignResult align_panorama(const Panorama& p, const Raster<T>& aerial, const geom::GeoGrid& aerial_grid,
                           const AlignConfig& cfg, const std::vector<geom::Polyline>* curbs = nullptr,
                           const Mask* edges = nullptr, const EdgeOptions& edge_opt = panorama_edge_options(),
                           NccMethod method = NccMethod::kFft) {
  AlignResult r;
  r.coarse = coarse_align(p, aerial, aerial_grid, cfg, method);
  r.pose = {p.reported_position + geom::Point2{r.coarse.x, r.coarse.y}, r.coarse.z, p.heading};
  if (!curbs) return r;
  const Mask em = edges ? *edges : edge_map(p.pixels, edge_opt);
  r.fine = fine_align(r.pose, curbs_near(*curbs, r.pose.position, cfg.curb_max_range + 2.0), em, cfg);
  r.coarse.fine_inliers = r.fine->inliers;
  r.pose.position = r.pose.position + r.fine->displacement;
  return r;
}

}  // namespace urbanbench::align
