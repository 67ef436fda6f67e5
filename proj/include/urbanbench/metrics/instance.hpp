#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/rasterize.hpp"

namespace urbanbench::metrics {

// An instance as a sorted list of row-major pixel indices.
struct Instance {
  std::vector<std::uint32_t> pixels;
  std::optional<double> score;
  std::optional<double> height;  // meters
};

struct InstanceSet {
  int width = 0;
  int height = 0;
  std::vector<Instance> instances;
  std::optional<Mask> dontcare;
};

// One instance per positive label, ordered by label value.
inline InstanceSet instances_from_labels(const LabelImage& labels) {
  InstanceSet set{labels.width(), labels.height(), {}, std::nullopt};
  std::vector<std::int32_t> ids;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] > 0) ids.push_back(labels[i]);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  set.instances.resize(ids.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] <= 0) continue;
    const auto k = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), labels[i]) - ids.begin());
    set.instances[k].pixels.push_back(static_cast<std::uint32_t>(i));
  }
  return set;
}

inline InstanceSet instances_from_polygons(const std::vector<geom::Polygon>& polys, const geom::GeoGrid& grid) {
  InstanceSet set{grid.width, grid.height, {}, std::nullopt};
  for (const auto& p : polys) set.instances.push_back({geom::pixel_indices(p, grid), std::nullopt, std::nullopt});
  return set;
}

struct Overlap {
  std::size_t pred = 0;
  std::size_t gt = 0;
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  double iou() const { return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0; }
  // Inclusive threshold test on exact integer counts.
  bool at_least(double thr) const { return static_cast<double>(inter) >= thr * static_cast<double>(uni); }
};

// Instance sets after don't-care removal, with all nonzero overlaps.
struct OverlapTable {
  std::vector<Instance> pred;
  std::vector<Instance> gt;
  std::vector<Overlap> pairs;
};

namespace detail {

struct Box {
  std::uint32_t r0, r1, c0, c1;
};

inline Box box_of(const std::vector<std::uint32_t>& px, int width) {
  Box b{UINT32_MAX, 0, UINT32_MAX, 0};
  const auto w = static_cast<std::uint32_t>(width);
  for (auto i : px) {
    const std::uint32_t r = i / w, c = i % w;
    b.r0 = std::min(b.r0, r);
    b.r1 = std::max(b.r1, r);
    b.c0 = std::min(b.c0, c);
    b.c1 = std::max(b.c1, c);
  }
  return b;
}

inline std::uint64_t intersection_size(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::uint64_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline std::vector<Instance> strip(const InstanceSet& set, const Mask* dc) {
  std::vector<Instance> out;
  for (const auto& inst : set.instances) {
    Instance c = inst;
    if (dc) std::erase_if(c.pixels, [dc](std::uint32_t i) { return (*dc)[i] != 0; });
    std::sort(c.pixels.begin(), c.pixels.end());
    c.pixels.erase(std::unique(c.pixels.begin(), c.pixels.end()), c.pixels.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

// Don't-care pixels of either set are removed from every instance. Ground
// truth instances that end up empty are dropped; empty predictions are kept
// so they count as false positives.
inline OverlapTable overlap_table(const InstanceSet& pred, const InstanceSet& gt) {
  require(pred.width == gt.width && pred.height == gt.height, "instance sets have different dimensions");
  Mask dc(gt.width, gt.height, 0);
  bool any_dc = false;
  for (const auto* s : {&pred, &gt})
    if (s->dontcare) {
      require(s->dontcare->width() == gt.width && s->dontcare->height() == gt.height,
              "don't-care mask dimension mismatch");
      for (std::size_t i = 0; i < dc.size(); ++i) dc[i] |= (*s->dontcare)[i];
      any_dc = true;
    }
  OverlapTable t;
  t.pred = detail::strip(pred, any_dc ? &dc : nullptr);
  t.gt = detail::strip(gt, any_dc ? &dc : nullptr);
  std::erase_if(t.gt, [](const Instance& g) { return g.pixels.empty(); });

  std::vector<detail::Box> pb, gb;
  for (const auto& p : t.pred) pb.push_back(detail::box_of(p.pixels, gt.width));
  for (const auto& g : t.gt) gb.push_back(detail::box_of(g.pixels, gt.width));
  for (std::size_t i = 0; i < t.pred.size(); ++i) {
    if (t.pred[i].pixels.empty()) continue;
    for (std::size_t j = 0; j < t.gt.size(); ++j) {
      if (pb[i].r1 < gb[j].r0 || gb[j].r1 < pb[i].r0 || pb[i].c1 < gb[j].c0 || gb[j].c1 < pb[i].c0) continue;
      const std::uint64_t inter = detail::intersection_size(t.pred[i].pixels, t.gt[j].pixels);
      if (inter == 0) continue;
      t.pairs.push_back({i, j, inter, t.pred[i].pixels.size() + t.gt[j].pixels.size() - inter});
    }
  }
  return t;
}

// Greedy one-to-one matching in descending IoU order, keeping pairs whose IoU
// is at least `thr`. Ties go to the lower (gt, pred) index pair.
inline std::vector<Overlap> greedy_match(const OverlapTable& t, double thr = 0.5) {
  std::vector<Overlap> cand;
  for (const auto& o : t.pairs)
    if (o.at_least(thr)) cand.push_back(o);
  std::sort(cand.begin(), cand.end(), [](const Overlap& a, const Overlap& b) {
    const auto lhs = a.inter * b.uni, rhs = b.inter * a.uni;
    if (lhs != rhs) return lhs > rhs;
    return std::tie(a.gt, a.pred) < std::tie(b.gt, b.pred);
  });
  std::vector<char> pu(t.pred.size(), 0), gu(t.gt.size(), 0);
  std::vector<Overlap> out;
  for (const auto& o : cand) {
    if (pu[o.pred] || gu[o.gt]) continue;
    pu[o.pred] = gu[o.gt] = 1;
    out.push_back(o);
  }
  return out;
}

// Area-weighted best IoU per ground-truth instance.
inline std::optional<double> weighted_coverage(const OverlapTable& t) {
  if (t.gt.empty()) return std::nullopt;
  std::vector<double> best(t.gt.size(), 0.0);
  for (const auto& o : t.pairs) best[o.gt] = std::max(best[o.gt], o.iou());
  double total = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < t.gt.size(); ++j) {
    const auto a = static_cast<double>(t.gt[j].pixels.size());
    total += a;
    acc += a * best[j];
  }
  return acc / total;
}

// Predictions ranked by score (all must carry one), otherwise by area; each
// claims the unmatched gt with the highest IoU >= thr. All-point interpolated
// area under the precision/recall curve.
inline std::optional<double> average_precision(const OverlapTable& t, double thr = 0.5) {
  if (t.gt.empty()) return std::nullopt;
  const bool scored = !t.pred.empty() && std::all_of(t.pred.begin(), t.pred.end(),
                                                      [](const Instance& p) { return p.score.has_value(); });
  std::vector<std::size_t> order(t.pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored) return *t.pred[a].score > *t.pred[b].score;
    return t.pred[a].pixels.size() > t.pred[b].pixels.size();
  });
  std::vector<std::vector<const Overlap*>> by_pred(t.pred.size());
  for (const auto& o : t.pairs) by_pred[o.pred].push_back(&o);

  std::vector<char> taken(t.gt.size(), 0);
  std::vector<double> prec, rec;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Overlap* hit = nullptr;
    for (const Overlap* o : by_pred[order[k]]) {
      if (taken[o->gt] || !o->at_least(thr)) continue;
      if (!hit || o->inter * hit->uni > hit->inter * o->uni) hit = o;
    }
    if (hit) {
      taken[hit->gt] = 1;
      ++tp;
    }
    prec.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    rec.push_back(static_cast<double>(tp) / static_cast<double>(t.gt.size()));
  }
  for (std::size_t k = prec.size(); k-- > 1;) prec[k - 1] = std::max(prec[k - 1], prec[k]);
  double ap = 0.0, last_r = 0.0;
  for (std::size_t k = 0; k < prec.size(); ++k) {
    ap += (rec[k] - last_r) * prec[k];
    last_r = rec[k];
  }
  return ap;
}

struct InstanceReport {
  std::optional<double> wcov;
  std::optional<double> ap;
  std::optional<double> precision50;
  std::optional<double> recall50;
  std::size_t n_pred = 0, n_gt = 0, n_matched = 0;
};

inline InstanceReport instance_metrics(const InstanceSet& pred, const InstanceSet& gt) {
  const auto t = overlap_table(pred, gt);
  InstanceReport r;
  r.n_pred = t.pred.size();
  r.n_gt = t.gt.size();
  r.n_matched = greedy_match(t, 0.5).size();
  r.wcov = weighted_coverage(t);
  r.ap = average_precision(t, 0.5);
  if (r.n_pred > 0) r.precision50 = static_cast<double>(r.n_matched) / static_cast<double>(r.n_pred);
  if (r.n_gt > 0) r.recall50 = static_cast<double>(r.n_matched) / static_cast<double>(r.n_gt);
  return r;
}

}  // namespace urbanbench::metrics
