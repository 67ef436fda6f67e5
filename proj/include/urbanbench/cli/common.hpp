#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "urbanbench/cli/options.hpp"
#include "urbanbench/core/vector_map.hpp"
#include "urbanbench/io/geojson.hpp"
#include "urbanbench/io/png.hpp"
#include "urbanbench/io/report.hpp"

namespace urbanbench::cli {

namespace fs = std::filesystem;
using io::json;

// Raster layout shared by every command that writes or reads tiles.
struct RasterSettings {
  double tile_size = 500.0;  // meters
  double resolution = 0.1;   // meters per pixel
};

inline void bind(const io::Config& c, RasterSettings& r) {
  c.bind("raster.tile_size", r.tile_size);
  c.bind("raster.resolution", r.resolution);
  require(r.tile_size > 0.0 && r.resolution > 0.0, "raster.tile_size and raster.resolution must be positive",
          ErrorCode::kConfig);
  const double px = r.tile_size / r.resolution;
  require(std::abs(px - std::round(px)) < 1e-6, "raster.tile_size must be a whole number of pixels", ErrorCode::kConfig);
}

// Marks every documented key as known, so a shared config file may hold
// settings for other commands while typos are still rejected.
inline void check_config_keys(const io::Config& c) {
  align::AlignConfig a;
  align::EdgeOptions e = align::panorama_edge_options();
  road::MrfParams m;
  road::RoadSurfaceOptions ro;
  synth::CityParams cp;
  synth::FixtureOptions fo;
  extract::MedialAxisOptions mo;
  BuildingExtractOptions bo;
  EvalOptions ev;
  RasterSettings rs;
  bind(c, a);
  bind(c, e);
  bind(c, m);
  bind(c, ro);
  bind(c, cp);
  bind(c, fo);
  bind(c, mo);
  bind(c, bo);
  bind(c, ev);
  bind(c, rs);
  c.reject_unknown();
}

struct Tile {
  std::string name;  // tile_<column>_<row>, counted from the south-west corner
  geom::GeoGrid grid;
};

// Tiles covering the map extent; edge tiles are clipped to the extent.
inline std::vector<Tile> map_tiles(const VectorMap& map, const RasterSettings& rs) {
  require(map.extent_x > 0.0 && map.extent_y > 0.0, "map has an empty extent", ErrorCode::kSchema);
  const int nx = static_cast<int>(std::ceil(map.extent_x / rs.tile_size - 1e-9));
  const int ny = static_cast<int>(std::ceil(map.extent_y / rs.tile_size - 1e-9));
  std::vector<Tile> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x0 = i * rs.tile_size, y0 = j * rs.tile_size;
      const double wx = std::min(rs.tile_size, map.extent_x - x0), wy = std::min(rs.tile_size, map.extent_y - y0);
      const geom::GeoGrid g{{map.origin.x + x0, map.origin.y + y0}, rs.resolution,
                            static_cast<int>(std::lround(wx / rs.resolution)),
                            static_cast<int>(std::lround(wy / rs.resolution))};
      out.push_back({"tile_" + std::to_string(i) + "_" + std::to_string(j), g});
    }
  return out;
}

// Files named `name` below `root` (or `root` itself when it is a file), in
// sorted order.
inline std::vector<fs::path> find_files(const fs::path& root, const std::string& name) {
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) fail(ErrorCode::kMissingFile, "no such file or directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == name) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Ground-truth and prediction files paired by relative path.
inline std::vector<std::pair<fs::path, fs::path>> pair_files(const fs::path& gt, const fs::path& pred,
                                                             const std::string& name) {
  if (fs::is_regular_file(gt)) {
    if (!fs::is_regular_file(pred)) fail(ErrorCode::kMissingFile, "prediction file not found: " + pred.string());
    return {{gt, pred}};
  }
  std::vector<std::pair<fs::path, fs::path>> out;
  for (const auto& g : find_files(gt, name)) {
    const fs::path p = pred / fs::relative(g, gt);
    if (!fs::is_regular_file(p)) fail(ErrorCode::kMissingFile, "prediction file not found: " + p.string());
    out.emplace_back(g, p);
  }
  if (out.empty()) fail(ErrorCode::kMissingFile, "no " + name + " found under " + gt.string());
  return out;
}

// Rasters of equal width stacked north to south. Metrics that only count
// pixels or match instances within one raster give the same result on the
// stack as on the union of the parts.
template <typename T>
Raster<T> stack_rows(const std::vector<Raster<T>>& parts) {
  require(!parts.empty(), "nothing to stack");
  int h = 0;
  for (const auto& p : parts) {
    require(p.width() == parts.front().width(), "tiles of different widths cannot be evaluated together",
            ErrorCode::kSchema);
    h += p.height();
  }
  Raster<T> out(parts.front().width(), h);
  std::size_t at = 0;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(at));
    at += p.size();
  }
  return out;
}

inline void write_jsonl(const fs::path& path, const std::vector<json>& lines) {
  std::string text;
  for (const auto& l : lines) text += l.dump() + "\n";
  io::write_text(path, text);
}

inline std::vector<json> read_jsonl(const fs::path& path) {
  const std::string text = io::read_text(path);
  std::vector<json> out;
  std::size_t start = 0, lineno = 1;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(start, nl - start);
    if (!line.empty()) {
      try {
        out.push_back(json::parse(line));
      } catch (const json::parse_error&) {
        fail(ErrorCode::kSchema, path.string() + ": line " + std::to_string(lineno) + " is not valid JSON");
      }
    }
    start = nl + 1;
    ++lineno;
  }
  return out;
}

// Vector file with only the given polylines as centerlines.
inline VectorMap lines_map(const std::vector<geom::Polyline>& lines, const VectorMap* extent_from = nullptr) {
  VectorMap m;
  if (extent_from) m.origin = extent_from->origin, m.extent_x = extent_from->extent_x, m.extent_y = extent_from->extent_y;
  for (std::size_t i = 0; i < lines.size(); ++i) m.centerlines.push_back({static_cast<int>(i), lines[i], {}, {}, 0.0});
  return m;
}

inline void emit_report(const io::MetricReport& r, const std::optional<fs::path>& json_out, std::ostream& out) {
  out << r.table();
  if (json_out) io::write_text(*json_out, r.to_json().dump(1) + "\n");
}

}  // namespace urbanbench::cli
