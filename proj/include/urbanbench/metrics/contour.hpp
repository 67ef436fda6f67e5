#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "urbanbench/geom/turning.hpp"
#include "urbanbench/metrics/instance.hpp"

namespace urbanbench::metrics {

inline double turning_similarity(const geom::Polygon& a, const geom::Polygon& b) {
  const double d = geom::turning_distance(geom::turning_function(a), geom::turning_function(b));
  return std::max(0.0, 1.0 - d / std::numbers::pi);
}

struct ContourReport {
  std::optional<double> wcov;
  std::optional<double> polysim;
};

// Both scores use rasterized areas on `grid` as weights; polysim multiplies
// each pair's IoU by the turning-function similarity of the two outlines.
inline ContourReport contour_metrics(const std::vector<geom::Polygon>& pred, const std::vector<geom::Polygon>& gt,
                                     const geom::GeoGrid& grid, const Mask* dontcare = nullptr) {
  auto ps = instances_from_polygons(pred, grid);
  auto gs = instances_from_polygons(gt, grid);
  if (dontcare) gs.dontcare = *dontcare;
  // Keep the gt index mapping: empty gt rasters are dropped by overlap_table.
  std::vector<std::size_t> gt_index;
  for (std::size_t j = 0; j < gs.instances.size(); ++j) {
    auto px = gs.instances[j].pixels;
    if (dontcare) std::erase_if(px, [dontcare](std::uint32_t i) { return (*dontcare)[i] != 0; });
    if (!px.empty()) gt_index.push_back(j);
  }
  const auto t = overlap_table(ps, gs);
  ContourReport r;
  r.wcov = weighted_coverage(t);
  if (t.gt.empty()) return r;

  std::vector<double> best(t.gt.size(), 0.0);
  for (const auto& o : t.pairs) {
    const double iou = o.iou();
    if (iou <= best[o.gt]) continue;  // turnsim <= 1 cannot lift it past the current best
    best[o.gt] = std::max(best[o.gt], iou * turning_similarity(gt[gt_index[o.gt]], pred[o.pred]));
  }
  double total = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < t.gt.size(); ++j) {
    const auto a = static_cast<double>(t.gt[j].pixels.size());
    total += a;
    acc += a * best[j];
  }
  r.polysim = acc / total;
  return r;
}

}  // namespace urbanbench::metrics
