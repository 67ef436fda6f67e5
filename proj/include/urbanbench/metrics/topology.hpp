#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "urbanbench/geom/discretize.hpp"

namespace urbanbench::metrics {

struct TopologyReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t pred_samples = 0;
  std::size_t gt_samples = 0;
};

namespace detail {

// Uniform hash grid over segments; each segment is registered in every cell
// its bounding box, grown by `reach`, touches. A point query then only looks
// at its own cell.
class SegmentIndex {
 public:
  SegmentIndex(const std::vector<geom::Polyline>& lines, double reach) : reach_(reach) {
    cell_ = std::max(reach, 1.0);
    for (const auto& l : lines)
      for (std::size_t k = 0; k < l.segment_count(); ++k) {
        const geom::Segment s = l.segment(k);
        const auto id = static_cast<std::uint32_t>(segs_.size());
        segs_.push_back(s);
        const long x0 = key(std::min(s.a.x, s.b.x) - reach), x1 = key(std::max(s.a.x, s.b.x) + reach);
        const long y0 = key(std::min(s.a.y, s.b.y) - reach), y1 = key(std::max(s.a.y, s.b.y) + reach);
        for (long x = x0; x <= x1; ++x)
          for (long y = y0; y <= y1; ++y) cells_[pack(x, y)].push_back(id);
      }
  }

  bool within(geom::Point2 p) const {
    auto it = cells_.find(pack(key(p.x), key(p.y)));
    if (it == cells_.end()) return false;
    for (auto id : it->second)
      if (geom::point_segment_distance(p, segs_[id]) <= reach_) return true;
    return false;
  }

 private:
  long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static std::uint64_t pack(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) | static_cast<std::uint32_t>(y);
  }

  double reach_;
  double cell_ = 1.0;
  std::vector<geom::Segment> segs_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

inline std::vector<geom::Point2> samples(const std::vector<geom::Polyline>& lines, double step) {
  std::vector<geom::Point2> out;
  for (const auto& l : lines) {
    const auto pts = geom::discretize(l, step);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

inline double fraction_within(const std::vector<geom::Point2>& pts, const std::vector<geom::Polyline>& target,
                              double tau) {
  const SegmentIndex index(target, tau);
  std::size_t hit = 0;
  for (const auto& p : pts) hit += index.within(p);
  return static_cast<double>(hit) / static_cast<double>(pts.size());
}

}  // namespace detail

// Both sides are sampled every `step` meters; a sample counts as correct if
// it lies within `tau` of the other side's polylines.
inline TopologyReport topology_pr(const std::vector<geom::Polyline>& pred, const std::vector<geom::Polyline>& gt,
                                  double tau, double step = 0.1) {
  require(tau > 0.0, "topology_pr: tau must be positive");
  require(step > 0.0, "topology_pr: step must be positive");
  TopologyReport r;
  const auto ps = detail::samples(pred, step);
  const auto gs = detail::samples(gt, step);
  r.pred_samples = ps.size();
  r.gt_samples = gs.size();
  if (ps.empty() && gs.empty()) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  if (!ps.empty() && !gs.empty()) {
    r.precision = detail::fraction_within(ps, gt, tau);
    r.recall = detail::fraction_within(gs, pred, tau);
  }
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

}  // namespace urbanbench::metrics
