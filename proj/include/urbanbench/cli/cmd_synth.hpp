#pragma once

#include <random>

#include "urbanbench/cli/common.hpp"
#include "urbanbench/extract/components.hpp"
#include "urbanbench/geom/rasterize.hpp"
#include "urbanbench/road/surface.hpp"
#include "urbanbench/synth/city.hpp"
#include "urbanbench/synth/fixture.hpp"
#include "urbanbench/synth/render.hpp"

namespace urbanbench::cli {

// Panorama PNG whose sidecar also carries the camera record.
struct PanoramaFile {
  std::string id;
  align::Panorama panorama;
};

inline void save_panorama(const fs::path& path, const std::string& id, const align::Panorama& p) {
  const geom::GeoGrid unit{{0.0, 0.0}, 1.0, p.width(), p.height()};
  io::save_intensity(path, p.pixels, unit, "panorama");
  json side = io::read_json(io::sidecar_path(path));
  side["camera"] = {{"id", id},
                    {"x", p.reported_position.x},
                    {"y", p.reported_position.y},
                    {"heading_rad", p.heading},
                    {"reported_height_m", p.nominal_height}};
  io::write_text(io::sidecar_path(path), side.dump(1) + "\n");
}

inline PanoramaFile load_panorama(const fs::path& path) {
  auto r = io::load_raster<float>(path);
  const fs::path side = io::sidecar_path(path);
  const json meta = fs::exists(side) ? io::read_json(side) : json::object();
  if (!meta.contains("camera") || !meta["camera"].is_object())
    fail(ErrorCode::kSchema, side.string() + ": panorama sidecar needs a camera record");
  const json& c = meta["camera"];
  for (const char* k : {"x", "y", "heading_rad"})
    if (!c.contains(k) || !c[k].is_number()) fail(ErrorCode::kSchema, side.string() + ": camera needs numeric " + k);
  PanoramaFile f;
  f.id = c.value("id", path.parent_path().filename().string());
  f.panorama.pixels = std::move(r.raster);
  f.panorama.reported_position = {c["x"].get<double>(), c["y"].get<double>()};
  f.panorama.heading = c["heading_rad"].get<double>();
  f.panorama.nominal_height = c.value("reported_height_m", 2.5);
  try {
    f.panorama.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return f;
}

struct GenCityArgs {
  std::optional<std::uint64_t> seed;
  fs::path out;
};

inline int cmd_gen_city(const GenCityArgs& a, const io::Config& cfg, std::ostream& out) {
  synth::CityParams p;
  bind(cfg, p);
  if (a.seed) p.seed = *a.seed;
  const VectorMap map = synth::generate_city(p);
  io::save_vector_map(a.out / "map.geojson", map);
  out << "city seed " << p.seed << ": " << map.centerlines.size() << " centerlines, " << map.curbs.size() << " curbs, "
      << map.buildings.size() << " buildings, " << map.blocks.size() << " blocks -> " << (a.out / "map.geojson").string()
      << "\n";
  return 0;
}

struct RenderArgs {
  fs::path map;
  fs::path out;
  std::optional<double> res;
};

// Aerial intensity plus ground-truth rasters for every tile.
inline int cmd_render(const RenderArgs& a, const io::Config& cfg, std::ostream& out) {
  RasterSettings rs;
  synth::RenderOptions ro;
  bind(cfg, rs);
  bind(cfg, ro);
  if (a.res) rs.resolution = *a.res;
  const VectorMap map = io::load_vector_map(a.map);
  for (const auto& t : map_tiles(map, rs)) {
    const synth::AerialTile tile = synth::render_aerial(map, t.grid, ro);
    const fs::path dir = a.out / t.name;
    io::save_intensity(dir / "aerial.png", tile.image, t.grid, "aerial");
    io::save_raster(dir / "semantic.png", tile.semantic, {t.grid, 8, 1.0, 0.0, "semantic"});
    io::save_raster(dir / "instance.png", tile.instance, {t.grid, 16, 1.0, 0.0, "instance"});
    io::save_raster(dir / "height.png", tile.height, {t.grid, 16, 0.01, 0.0, "height"});
    io::save_raster(dir / "zoning.png", tile.zoning, {t.grid, 8, 1.0, 0.0, "zoning"});
    io::save_raster(dir / "dontcare.png", tile.dontcare, {t.grid, 8, 1.0, 0.0, "dontcare"});
    out << t.name << ": " << t.grid.width << "x" << t.grid.height << " px at " << rs.resolution << " m\n";
  }
  return 0;
}

// Background components without a single off-road ground-truth pixel: holes
// the road surface wrongly closed over.
inline int count_holes(const Mask& road, const Mask& truth) {
  Mask bg(road.width(), road.height());
  for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = !road[i];
  const auto cc = extract::connected_components(bg, 4);
  std::vector<char> off_road(static_cast<std::size_t>(cc.count) + 1, 0);
  for (std::size_t i = 0; i < bg.size(); ++i)
    if (cc.labels[i] && !truth[i]) off_road[cc.labels[i]] = 1;
  int holes = 0;
  for (int k = 1; k <= cc.count; ++k) holes += !off_road[k];
  return holes;
}

struct GenRoadsArgs {
  fs::path map;
  fs::path out;
  std::optional<double> res;
  std::optional<fs::path> json_out;
};

// Road surface from curbs and centerlines; the map's centerlines become the
// reference for road topology.
inline int cmd_gen_roads(const GenRoadsArgs& a, const io::Config& cfg, std::ostream& out) {
  RasterSettings rs;
  road::MrfParams mrf;
  road::RoadSurfaceOptions opt;
  bind(cfg, rs);
  bind(cfg, mrf);
  bind(cfg, opt);
  if (a.res) rs.resolution = *a.res;
  const VectorMap map = io::load_vector_map(a.map);
  const auto net = road::CenterlineNetwork::from_centerlines(map.road_centerlines());
  synth::RenderOptions masks;
  masks.texture = false;
  std::uint64_t inter = 0, uni = 0;
  int holes = 0;
  std::size_t unmatched = 0;
  json tiles = json::array();
  for (const auto& t : map_tiles(map, rs)) {
    const road::RoadSurface rsurf = road::generate_road_surface(map.curbs, net, mrf, t.grid, opt);
    const fs::path dir = a.out / t.name;
    io::save_raster(dir / "road.png", rsurf.road, {t.grid, 8, 1.0, 0.0, "road"});
    io::save_raster(dir / "dontcare.png", rsurf.dontcare, {t.grid, 8, 1.0, 0.0, "dontcare"});
    unmatched = rsurf.report.unmatched_centerlines.size();
    if (!map.road_outer) continue;
    // Compare with the generator's road mask when the map carries it.
    const synth::AerialTile truth = synth::render_aerial(map, t.grid, masks);
    Mask gt(t.grid.width, t.grid.height);
    std::uint64_t ti = 0, tu = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      gt[i] = truth.semantic[i] == synth::kRoad;
      ti += gt[i] && rsurf.road[i];
      tu += gt[i] || rsurf.road[i];
    }
    const int th = count_holes(rsurf.road, gt);
    inter += ti, uni += tu, holes += th;
    tiles.push_back({{"tile", t.name}, {"iou", tu ? static_cast<double>(ti) / tu : 1.0}, {"holes", th}});
  }
  VectorMap lines = map;
  lines.curbs.clear(), lines.buildings.clear(), lines.blocks.clear(), lines.road_outer.reset();
  io::save_vector_map(a.out / "centerlines.geojson", lines);
  io::MetricReport r;
  r.task = "gen-roads";
  if (map.road_outer) {
    r.add("IoU", uni ? static_cast<double>(inter) / uni : 1.0);
    r.add("holes", holes);
  }
  r.add("unmatched", static_cast<double>(unmatched));
  r.details["tiles"] = tiles;
  emit_report(r, a.json_out ? a.json_out : std::optional<fs::path>(a.out / "report.json"), out);
  return 0;
}

struct MakeFixturesArgs {
  fs::path map;
  fs::path out;
  int count = 10;
  std::optional<std::uint64_t> seed;
};

// Panoramas with planted pose offsets, each with the aerial crop around its
// reported position, listed in manifest.jsonl.
inline int cmd_make_fixtures(const MakeFixturesArgs& a, const io::Config& cfg, std::ostream& out) {
  synth::FixtureOptions fo;
  bind(cfg, fo);
  if (a.seed) fo.seed = *a.seed;
  require(a.count >= 0, "fixture count must be non-negative");
  const VectorMap map = io::load_vector_map(a.map);
  std::mt19937_64 rng(fo.seed);
  const double margin = 0.5 * fo.aerial_extent + fo.offset_max + 5.0;
  std::vector<json> manifest;
  for (int i = 0; i < a.count; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "fx%04d", i);
    const align::CameraPose pose = synth::sample_road_pose(map, rng, margin);
    synth::FixtureOptions f = fo;
    f.seed = fo.seed * 1000003ULL + static_cast<std::uint64_t>(i);
    const synth::PanoramaFixture fx = synth::make_panorama_fixture(map, pose, f);
    const fs::path dir = a.out / id;
    save_panorama(dir / "panorama.png", id, fx.panorama);
    io::save_intensity(dir / "aerial.png", fx.aerial.image, fx.aerial.grid, "aerial");
    manifest.push_back({{"id", id},
                        {"panorama", (fs::path(id) / "panorama.png").string()},
                        {"aerial", (fs::path(id) / "aerial.png").string()},
                        {"reported", {{"x", fx.panorama.reported_position.x}, {"y", fx.panorama.reported_position.y}}},
                        {"heading_rad", fx.panorama.heading},
                        {"true", {{"x", pose.position.x}, {"y", pose.position.y}, {"z", pose.height}}},
                        {"planted", {{"x", fx.planted.x}, {"y", fx.planted.y}}}});
  }
  write_jsonl(a.out / "manifest.jsonl", manifest);
  out << manifest.size() << " fixtures -> " << (a.out / "manifest.jsonl").string() << "\n";
  return 0;
}

}  // namespace urbanbench::cli
