#pragma once

#include <array>

#include "urbanbench/cli/common.hpp"
#include "urbanbench/extract/components.hpp"
#include "urbanbench/extract/contours.hpp"
#include "urbanbench/extract/morph.hpp"
#include "urbanbench/extract/skeleton.hpp"
#include "urbanbench/geom/rdp.hpp"

namespace urbanbench::cli {

struct BuildingInstances {
  LabelImage labels;  // 1..n, 0 elsewhere
  std::vector<geom::Polygon> outlines;
  std::vector<double> heights;  // per instance, 0 if unknown
};

// Opening, connected components, outer contours and simplification.
inline BuildingInstances extract_buildings(const Mask& mask, const geom::GeoGrid& grid, const BuildingExtractOptions& o,
                                           const Image* height = nullptr) {
  require(mask.width() == grid.width && mask.height() == grid.height, "mask does not match grid");
  const int radius = static_cast<int>(std::lround(o.open_radius / grid.resolution));
  const Mask opened = radius >= 1 ? extract::morph(mask, extract::MorphOp::kOpen, {radius}) : mask;
  const auto cc = extract::connected_components(opened, o.connectivity);
  std::vector<std::uint64_t> area(static_cast<std::size_t>(cc.count) + 1, 0);
  std::vector<double> hsum(area.size(), 0.0);
  // Bounding boxes as {c0, r0, c1, r1}.
  std::vector<std::array<int, 4>> box(area.size(), {mask.width(), mask.height(), -1, -1});
  for (int r = 0; r < mask.height(); ++r)
    for (int c = 0; c < mask.width(); ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * mask.width() + c;
      const int k = cc.labels[i];
      if (!k) continue;
      ++area[k];
      if (height) hsum[k] += (*height)[i];
      auto& b = box[k];
      b = {std::min(b[0], c), std::min(b[1], r), std::max(b[2], c), std::max(b[3], r)};
    }
  const double px_area = grid.resolution * grid.resolution;
  BuildingInstances out{LabelImage(mask.width(), mask.height(), 0), {}, {}};
  std::vector<int> relabel(area.size(), 0);
  for (int k = 1; k <= cc.count; ++k) {
    if (area[k] * px_area < o.min_area) continue;
    // Component cut out with a one pixel background border.
    const auto [c0, r0, c1, r1] = box[k];
    Mask one(c1 - c0 + 3, r1 - r0 + 3, 0);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) one(c - c0 + 1, r - r0 + 1) = cc.labels(c, r) == k;
    const geom::GeoGrid sub{{grid.origin.x + (c0 - 1) * grid.resolution,
                             grid.origin.y + (grid.height - 2 - r1) * grid.resolution},
                            grid.resolution, one.width(), one.height()};
    for (const auto& c : extract::mask_contours(one, sub)) {
      if (c.hole) continue;
      try {
        out.outlines.push_back(o.rdp_epsilon > 0.0 ? geom::rdp_simplify(c.ring, o.rdp_epsilon) : c.ring);
      } catch (const Error&) {
        continue;  // collapsed below a triangle
      }
      relabel[k] = static_cast<int>(out.outlines.size());
      out.heights.push_back(height ? hsum[k] / static_cast<double>(area[k]) : 0.0);
      break;
    }
  }
  for (std::size_t i = 0; i < opened.size(); ++i) out.labels[i] = relabel[cc.labels[i]];
  return out;
}

struct ExtractArgs {
  std::string kind;  // roads | buildings
  fs::path input;
  fs::path out;
  std::string name = "semantic.png";
  std::optional<int> label;
};

// Baseline post-processing of semantic rasters. A directory input is
// processed file by file, mirroring its layout under --out.
inline int cmd_extract(const ExtractArgs& a, const io::Config& cfg, std::ostream& out) {
  const bool roads = a.kind == "roads";
  require(roads || a.kind == "buildings", "extract kind must be 'roads' or 'buildings'");
  const int label = a.label.value_or(roads ? 1 : 2);
  extract::MedialAxisOptions mo;
  BuildingExtractOptions bo;
  bind(cfg, mo);
  bind(cfg, bo);
  const auto files = find_files(a.input, a.name);
  if (files.empty()) fail(ErrorCode::kMissingFile, "no " + a.name + " found under " + a.input.string());
  std::vector<geom::Polyline> all_lines;
  VectorMap all_buildings;
  int next_id = 0;
  bool first = true;
  for (const auto& f : files) {
    const auto sem = io::load_raster<int>(f);
    const geom::GeoGrid& grid = sem.meta.grid;
    Mask m(grid.width, grid.height);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = sem.raster[i] == label;
    // Grow the combined extent tile by tile.
    const double x1 = grid.max_x(), y1 = grid.max_y();
    if (first) {
      all_buildings.origin = grid.origin;
      all_buildings.extent_x = x1 - grid.origin.x, all_buildings.extent_y = y1 - grid.origin.y;
      first = false;
    } else {
      const double ox = std::min(all_buildings.origin.x, grid.origin.x), oy = std::min(all_buildings.origin.y, grid.origin.y);
      all_buildings.extent_x = std::max(all_buildings.origin.x + all_buildings.extent_x, x1) - ox;
      all_buildings.extent_y = std::max(all_buildings.origin.y + all_buildings.extent_y, y1) - oy;
      all_buildings.origin = {ox, oy};
    }
    const fs::path rel = fs::is_directory(a.input) ? fs::relative(f.parent_path(), a.input) : fs::path();
    if (roads) {
      const auto lines = extract::medial_axis(m, grid, mo);
      all_lines.insert(all_lines.end(), lines.begin(), lines.end());
    } else {
      std::optional<Image> height;
      if (const fs::path hp = f.parent_path() / "height.png"; fs::exists(hp)) {
        auto h = io::load_raster<double>(hp);
        if (h.meta.grid == grid) height = std::move(h.raster);
      }
      const auto b = extract_buildings(m, grid, bo, height ? &*height : nullptr);
      io::save_raster(a.out / rel / "instance.png", b.labels, {grid, 16, 1.0, 0.0, "instance"});
      for (std::size_t k = 0; k < b.outlines.size(); ++k)
        all_buildings.buildings.push_back({next_id++, b.outlines[k], b.heights[k]});
    }
  }
  if (roads) {
    VectorMap lm = lines_map(all_lines, &all_buildings);
    io::save_vector_map(a.out / "centerlines.geojson", lm);
    out << all_lines.size() << " centerline pieces -> " << (a.out / "centerlines.geojson").string() << "\n";
  } else {
    io::save_vector_map(a.out / "buildings.geojson", all_buildings);
    out << all_buildings.buildings.size() << " buildings -> " << (a.out / "buildings.geojson").string() << "\n";
  }
  return 0;
}

}  // namespace urbanbench::cli
