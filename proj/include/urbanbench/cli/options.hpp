#pragma once

#include <string>

#include "urbanbench/align/edges.hpp"
#include "urbanbench/align/panorama.hpp"
#include "urbanbench/align/pipeline.hpp"
#include "urbanbench/extract/morph.hpp"
#include "urbanbench/extract/skeleton.hpp"
#include "urbanbench/io/config.hpp"
#include "urbanbench/metrics/height.hpp"
#include "urbanbench/road/mrf.hpp"
#include "urbanbench/road/surface.hpp"
#include "urbanbench/synth/city.hpp"
#include "urbanbench/synth/fixture.hpp"
#include "urbanbench/synth/render.hpp"

// Config keys are "<section>.<field>"; every default lives in the bound
// struct, so an empty config reproduces the library defaults.
namespace urbanbench::cli {

// Runs a validator, reporting its failure as a configuration error.
template <typename Fn>
void validate_config(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    fail(ErrorCode::kConfig, e.what());
  }
}

inline void bind(const io::Config& c, align::AlignConfig& a) {
  c.bind("align.search_xy", a.search_xy);
  c.bind("align.search_z_min", a.search_z_min);
  c.bind("align.search_z_max", a.search_z_max);
  c.bind("align.step", a.step);
  c.bind("align.sigma_x", a.sigma_x);
  c.bind("align.sigma_y", a.sigma_y);
  c.bind("align.sigma_z", a.sigma_z);
  c.bind("align.z_mean", a.z_mean);
  c.bind("align.lambda", a.lambda);
  c.bind("align.fine_window", a.fine_window);
  c.bind("align.fine_step", a.fine_step);
  c.bind("align.inlier_px", a.inlier_px);
  c.bind("align.rectified_extent", a.rectified_extent);
  c.bind("align.rectified_res", a.rectified_res);
  c.bind("align.curb_min_range", a.curb_min_range);
  c.bind("align.curb_max_range", a.curb_max_range);
  validate_config([&] { a.validate(); });
}

inline void bind(const io::Config& c, align::EdgeOptions& e) {
  c.bind("edges.quantile", e.quantile);
  c.bind("edges.smooth_sigma", e.smooth_sigma);
  c.bind("edges.wrap_columns", e.wrap_columns);
  e.validate();
}

inline void bind(const io::Config& c, road::MrfParams& m) {
  c.bind("mrf.K", m.K);
  c.bind("mrf.w_dist", m.w_dist);
  c.bind("mrf.w_angle", m.w_angle);
  c.bind("mrf.lambda_potts", m.lambda_potts);
  c.bind("mrf.no_match_cost", m.no_match_cost);
  validate_config([&] { m.validate(); });
}

inline void bind(const io::Config& c, road::RoadSurfaceOptions& o) {
  c.bind("roads.curb_dontcare_width", o.polygonize.curb_dontcare_width);
  c.bind("roads.centerline_dontcare_width", o.centerline_dontcare_width);
}

inline void bind(const io::Config& c, synth::CityParams& p) {
  c.bind("city.seed", p.seed);
  c.bind("city.extent", p.extent);
  c.bind("city.tile_size", p.tile_size);
  c.bind("city.block_min", p.block_min);
  c.bind("city.block_max", p.block_max);
  c.bind("city.road_width_min", p.road_width_min);
  c.bind("city.road_width_max", p.road_width_max);
  c.bind("city.node_jitter", p.node_jitter);
  c.bind("city.fillet_radius", p.fillet_radius);
  c.bind("city.sidewalk_width", p.sidewalk_width);
  c.bind("city.setback", p.setback);
  c.bind("city.curb_step", p.curb_step);
  c.bind("city.centerline_step", p.centerline_step);
  c.bind("city.building_coverage", p.building_coverage);
  c.bind("city.building_gap", p.building_gap);
  c.bind("city.area_mean", p.area_mean);
  c.bind("city.area_log_sigma", p.area_log_sigma);
  c.bind("city.height_mean", p.height_mean);
  c.bind("city.height_log_sigma", p.height_log_sigma);
  c.bind("city.p_residential", p.p_residential);
  c.bind("city.p_others", p.p_others);
  p.validate();
}

inline void bind(const io::Config& c, synth::RenderOptions& r, const std::string& prefix = "render") {
  c.bind(prefix + ".seed", r.seed);
  c.bind(prefix + ".texture", r.texture);
  c.bind(prefix + ".sidewalk_width", r.sidewalk_width);
  c.bind(prefix + ".marking_width", r.marking_width);
  c.bind(prefix + ".dash_length", r.dash_length);
  c.bind(prefix + ".shadow_scale", r.shadow_scale);
  c.bind(prefix + ".noise_cell", r.noise_cell);
  c.bind(prefix + ".noise_fine", r.noise_fine);
  c.bind(prefix + ".noise_mid", r.noise_mid);
  c.bind(prefix + ".noise_coarse", r.noise_coarse);
}

inline void bind(const io::Config& c, synth::FixtureOptions& f) {
  c.bind("fixture.seed", f.seed);
  c.bind("fixture.pano_height", f.pano_height);
  c.bind("fixture.offset_sigma", f.offset_sigma);
  c.bind("fixture.offset_max", f.offset_max);
  c.bind("fixture.noise_sigma", f.noise_sigma);
  c.bind("fixture.occluder_fraction", f.occluder_fraction);
  c.bind("fixture.aerial_extent", f.aerial_extent);
  c.bind("fixture.aerial_res", f.aerial_res);
  c.bind("fixture.max_range", f.max_range);
  c.bind("fixture.source_res", f.source_res);
  c.bind("fixture.haze", f.haze);
  c.bind("fixture.sky", f.sky);
  c.bind("fixture.supersample", f.supersample);
  bind(c, f.render);
  f.validate();
}

inline void bind(const io::Config& c, extract::MedialAxisOptions& m) {
  c.bind("extract.prune_length", m.prune_length);
  c.bind("extract.max_prune_rounds", m.max_prune_rounds);
}

// Baseline building extraction.
struct BuildingExtractOptions {
  double open_radius = 1.0;  // meters
  double rdp_epsilon = 0.5;  // meters
  int connectivity = 4;
  double min_area = 4.0;  // square meters; smaller components are dropped
};

inline void bind(const io::Config& c, BuildingExtractOptions& b) {
  c.bind("extract.open_radius", b.open_radius);
  c.bind("extract.rdp_epsilon", b.rdp_epsilon);
  c.bind("extract.connectivity", b.connectivity);
  c.bind("extract.min_area", b.min_area);
  require(b.open_radius >= 0.0 && b.rdp_epsilon >= 0.0 && b.min_area >= 0.0, "extract options must be non-negative",
          ErrorCode::kConfig);
  require(b.connectivity == 4 || b.connectivity == 8, "extract.connectivity must be 4 or 8", ErrorCode::kConfig);
}

// Evaluation thresholds.
struct EvalOptions {
  double topology_step = 0.1;  // meters between boundary samples
  double height_min = 0.1;
  double height_penalty = -1.0;  // negative: no penalty for unmatched buildings
};

inline void bind(const io::Config& c, EvalOptions& e) {
  c.bind("eval.topology_step", e.topology_step);
  c.bind("eval.height_min", e.height_min);
  c.bind("eval.height_penalty", e.height_penalty);
  require(e.topology_step > 0.0 && e.height_min > 0.0, "eval thresholds must be positive", ErrorCode::kConfig);
}

}  // namespace urbanbench::cli
