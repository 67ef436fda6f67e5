#pragma once

#include <map>
#include <sstream>

#include "urbanbench/cli/common.hpp"
#include "urbanbench/metrics/contour.hpp"
#include "urbanbench/metrics/height.hpp"
#include "urbanbench/metrics/instance.hpp"
#include "urbanbench/metrics/semantic.hpp"
#include "urbanbench/metrics/topology.hpp"

namespace urbanbench::cli {

struct EvalArgs {
  fs::path gt;
  fs::path pred;
  std::optional<fs::path> json_out;
  std::string name;            // raster file name inside tile directories
  std::vector<int> classes;    // eval-semantic
  bool use_dontcare = true;    // raster evals: gt-side dontcare.png
  std::vector<double> taus;    // eval-road-topology
  std::string layer = "centerline";
  std::optional<double> res;   // vector evals rasterize at this resolution
};

namespace detail {

struct StackedPair {
  Raster<int> gt, pred;
  std::optional<Mask> dontcare;
};

// With `relabel`, positive labels are shifted per tile so that ids from
// different tiles stay distinct after stacking.
inline StackedPair load_pairs(const EvalArgs& a, bool relabel = false) {
  std::vector<Raster<int>> g, p;
  int g_off = 0, p_off = 0;
  auto shift = [](Raster<int>& r, int& off) {
    int top = 0;
    for (auto& v : r.data())
      if (v > 0) top = std::max(top, v), v += off;
    off += top;
  };
  std::vector<Mask> dc;
  bool all_dc = a.use_dontcare;
  for (const auto& [gf, pf] : pair_files(a.gt, a.pred, a.name)) {
    auto gr = io::load_raster<int>(gf);
    auto pr = io::load_raster<int>(pf);
    if (!gr.raster.same_shape(pr.raster))
      fail(ErrorCode::kSchema, pf.string() + " does not match the size of " + gf.string());
    const fs::path dcf = gf.parent_path() / "dontcare.png";
    if (all_dc && fs::exists(dcf) && dcf != gf) {
      auto d = io::load_raster<std::uint8_t>(dcf);
      if (!d.raster.same_shape(gr.raster)) fail(ErrorCode::kSchema, dcf.string() + " does not match " + gf.string());
      dc.push_back(std::move(d.raster));
    } else {
      all_dc = false;
    }
    if (relabel) shift(gr.raster, g_off), shift(pr.raster, p_off);
    g.push_back(std::move(gr.raster));
    p.push_back(std::move(pr.raster));
  }
  StackedPair s{stack_rows(g), stack_rows(p), std::nullopt};
  if (all_dc) s.dontcare = stack_rows(dc);
  return s;
}

inline std::string tau_label(double t) {
  char buf[32];
  if (std::abs(t * 10.0 - std::round(t * 10.0)) < 1e-9)
    std::snprintf(buf, sizeof buf, "%.1f", t);
  else
    std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

inline geom::GeoGrid vector_grid(const VectorMap& m, double res) {
  require(m.extent_x > 0.0 && m.extent_y > 0.0, "map has an empty extent", ErrorCode::kSchema);
  return {m.origin, res, static_cast<int>(std::ceil(m.extent_x / res - 1e-9)),
          static_cast<int>(std::ceil(m.extent_y / res - 1e-9))};
}

}  // namespace detail

inline int cmd_eval_semantic(const EvalArgs& a, const io::Config&, std::ostream& out) {
  const auto s = detail::load_pairs(a);
  const auto rep = metrics::semantic_miou(s.pred, s.gt, a.classes, s.dontcare ? &*s.dontcare : nullptr);
  io::MetricReport r;
  r.task = "semantic";
  r.add("mIoU", rep.mean_iou);
  for (const auto& [c, ci] : rep.per_class) {
    r.add("IoU[" + std::to_string(c) + "]", ci.iou);
    r.details["classes"][std::to_string(c)] = {{"tp", ci.tp}, {"fp", ci.fp}, {"fn", ci.fn}};
  }
  emit_report(r, a.json_out, out);
  return 0;
}

inline int cmd_eval_instance(const EvalArgs& a, const io::Config&, std::ostream& out) {
  const auto s = detail::load_pairs(a, true);
  auto to_set = [](const Raster<int>& lab) {
    LabelImage l(lab.width(), lab.height());
    for (std::size_t i = 0; i < lab.size(); ++i) l[i] = lab[i];
    return metrics::instances_from_labels(l);
  };
  metrics::InstanceSet gs = to_set(s.gt);
  metrics::InstanceSet ps = to_set(s.pred);
  if (s.dontcare) gs.dontcare = *s.dontcare;
  const auto rep = metrics::instance_metrics(ps, gs);
  io::MetricReport r;
  r.task = "instance";
  r.add("WCov", rep.wcov);
  r.add("AP", rep.ap);
  r.add("P@50", rep.precision50);
  r.add("R@50", rep.recall50);
  r.details = {{"n_pred", rep.n_pred}, {"n_gt", rep.n_gt}, {"n_matched", rep.n_matched}};
  emit_report(r, a.json_out, out);
  return 0;
}

inline int cmd_eval_contour(const EvalArgs& a, const io::Config& cfg, std::ostream& out) {
  RasterSettings rs;
  bind(cfg, rs);
  const VectorMap g = io::load_vector_map(a.gt), p = io::load_vector_map(a.pred);
  const auto grid = detail::vector_grid(g, a.res.value_or(rs.resolution));
  std::vector<geom::Polygon> gp, pp;
  for (const auto& b : g.buildings) gp.push_back(b.footprint);
  for (const auto& b : p.buildings) pp.push_back(b.footprint);
  const auto rep = metrics::contour_metrics(pp, gp, grid);
  io::MetricReport r;
  r.task = "contour";
  r.add("WCov", rep.wcov);
  r.add("PolySim", rep.polysim);
  r.details = {{"n_pred", pp.size()}, {"n_gt", gp.size()}};
  emit_report(r, a.json_out, out);
  return 0;
}

inline int cmd_eval_height(const EvalArgs& a, const io::Config& cfg, std::ostream& out) {
  RasterSettings rs;
  EvalOptions eo;
  bind(cfg, rs);
  bind(cfg, eo);
  const VectorMap g = io::load_vector_map(a.gt), p = io::load_vector_map(a.pred);
  const auto grid = detail::vector_grid(g, a.res.value_or(rs.resolution));
  auto to_set = [&](const VectorMap& m, const fs::path& src) {
    std::vector<geom::Polygon> polys;
    for (const auto& b : m.buildings) {
      if (!(b.height > 0.0)) fail(ErrorCode::kSchema, src.string() + ": building " + std::to_string(b.id) + " has no height");
      polys.push_back(b.footprint);
    }
    auto set = metrics::instances_from_polygons(polys, grid);
    for (std::size_t k = 0; k < m.buildings.size(); ++k) set.instances[k].height = m.buildings[k].height;
    return set;
  };
  metrics::HeightOptions ho;
  ho.min_height = eo.height_min;
  if (eo.height_penalty >= 0.0) ho.unmatched_penalty = eo.height_penalty;
  const auto rep = metrics::height_log_rmse(to_set(p, a.pred), to_set(g, a.gt), ho);
  io::MetricReport r;
  r.task = "height";
  r.add("logRMSE", rep.log_rmse);
  if (ho.unmatched_penalty) r.add("logRMSE+pen", rep.log_rmse_with_penalty);
  r.details = {{"matched", rep.matched}, {"unmatched_gt", rep.unmatched_gt}};
  emit_report(r, a.json_out, out);
  return 0;
}

// F1, precision and recall at each tolerance, grouped by measure.
inline int cmd_eval_road_topology(const EvalArgs& a, const io::Config& cfg, std::ostream& out) {
  EvalOptions eo;
  bind(cfg, eo);
  require(a.layer == "centerline" || a.layer == "curb", "--layer must be 'centerline' or 'curb'");
  const std::vector<double> taus = a.taus.empty() ? std::vector<double>{0.5, 2.0} : a.taus;
  auto lines = [&](const VectorMap& m) { return a.layer == "curb" ? m.curbs : m.centerline_polylines(); };
  const VectorMap g = io::load_vector_map(a.gt), p = io::load_vector_map(a.pred);
  std::vector<metrics::TopologyReport> reps;
  for (double t : taus) reps.push_back(metrics::topology_pr(lines(p), lines(g), t, eo.topology_step));
  io::MetricReport r;
  r.task = "road-topology";
  for (std::size_t k = 0; k < taus.size(); ++k) r.add("F1@" + detail::tau_label(taus[k]), reps[k].f1);
  for (std::size_t k = 0; k < taus.size(); ++k) r.add("Pr@" + detail::tau_label(taus[k]), reps[k].precision);
  for (std::size_t k = 0; k < taus.size(); ++k) r.add("Re@" + detail::tau_label(taus[k]), reps[k].recall);
  r.details = {{"layer", a.layer}, {"pred_samples", reps.front().pred_samples}, {"gt_samples", reps.front().gt_samples}};
  emit_report(r, a.json_out, out);
  return 0;
}

// Zoning categories matched by block id; a block missing from the
// prediction counts as wrong.
inline int cmd_eval_zoning(const EvalArgs& a, const io::Config&, std::ostream& out) {
  const VectorMap g = io::load_vector_map(a.gt), p = io::load_vector_map(a.pred);
  std::map<int, int> pz;
  for (const auto& b : p.blocks) pz[b.id] = static_cast<int>(b.zone);
  std::vector<int> pred, gt;
  for (const auto& b : g.blocks) {
    gt.push_back(static_cast<int>(b.zone));
    auto it = pz.find(b.id);
    pred.push_back(it == pz.end() ? -1 : it->second);
  }
  io::MetricReport r;
  r.task = "zoning";
  r.add("Top1", metrics::top1_accuracy(pred, gt));
  r.details = {{"blocks", gt.size()}};
  emit_report(r, a.json_out, out);
  return 0;
}

}  // namespace urbanbench::cli
