#pragma once

#include "urbanbench/align/pipeline.hpp"
#include "urbanbench/cli/cmd_synth.hpp"
#include "urbanbench/core/parallel.hpp"

namespace urbanbench::cli {

// Aerial tiles on a common pixel lattice, kept as raw samples and cut into
// float crops on demand.
class AerialMosaic {
 public:
  static AerialMosaic from_files(const std::vector<fs::path>& files) {
    AerialMosaic m;
    for (const auto& f : files) {
      const fs::path side = io::sidecar_path(f);
      if (!fs::exists(side)) fail(ErrorCode::kSchema, f.string() + ": aerial tile needs a sidecar");
      Piece p{io::read_png(f), io::meta_from_json(io::read_json(side), side.string())};
      if (p.meta.grid.width != p.data.width || p.meta.grid.height != p.data.height)
        fail(ErrorCode::kSchema, side.string() + ": sidecar size does not match the PNG");
      if (!m.pieces_.empty()) {
        const auto& g0 = m.pieces_.front().meta.grid;
        const auto& g = p.meta.grid;
        const double fx = (g.origin.x - g0.origin.x) / g0.resolution, fy = (g.origin.y - g0.origin.y) / g0.resolution;
        if (std::abs(g.resolution - g0.resolution) > 1e-9 * g0.resolution || std::abs(fx - std::round(fx)) > 1e-6 ||
            std::abs(fy - std::round(fy)) > 1e-6)
          fail(ErrorCode::kSchema, f.string() + ": aerial tiles do not share one pixel lattice");
      }
      m.pieces_.push_back(std::move(p));
    }
    if (m.pieces_.empty()) fail(ErrorCode::kMissingFile, "no aerial tiles found");
    return m;
  }

  const geom::GeoGrid& lattice() const { return pieces_.front().meta.grid; }

  // Square crop on the lattice covering `center` +- `half` meters.
  ImageF crop(geom::Point2 center, double half, geom::GeoGrid& grid) const {
    const geom::GeoGrid& g0 = lattice();
    const double res = g0.resolution;
    const int n = static_cast<int>(std::ceil(2.0 * half / res)) + 2;
    grid = {{g0.origin.x + std::floor((center.x - half - g0.origin.x) / res) * res,
             g0.origin.y + std::floor((center.y - half - g0.origin.y) / res) * res},
            res, n, n};
    ImageF out(n, n);
    Mask have(n, n, 0);
    for (const auto& p : pieces_) {
      const geom::GeoGrid& g = p.meta.grid;
      // Offset of this tile's column 0 / bottom row in crop pixels.
      const long dc = std::lround((g.origin.x - grid.origin.x) / res);
      const long drow_bottom = std::lround((g.origin.y - grid.origin.y) / res);
      for (int r = 0; r < n; ++r) {
        const long from_bottom = n - 1 - r;  // crop row counted from the south
        const long tr = g.height - 1 - (from_bottom - drow_bottom);
        if (tr < 0 || tr >= g.height) continue;
        for (int c = 0; c < n; ++c) {
          const long tc = c - dc;
          if (tc < 0 || tc >= g.width || have(c, r)) continue;
          out(c, r) = static_cast<float>(p.data.samples[static_cast<std::size_t>(tr) * g.width + tc] * p.meta.scale +
                                         p.meta.offset);
          have(c, r) = 1;
        }
      }
    }
    if (std::find(have.data().begin(), have.data().end(), 0) != have.data().end())
      fail(ErrorCode::kMargin, "aerial imagery does not cover the search margin around (" + std::to_string(center.x) +
                                   ", " + std::to_string(center.y) + ")");
    return out;
  }

 private:
  struct Piece {
    io::PngData data;
    io::RasterMeta meta;
  };
  std::vector<Piece> pieces_;
};

struct AlignArgs {
  fs::path panoramas;
  std::optional<fs::path> aerial;
  std::optional<fs::path> map;
  std::optional<fs::path> edges;
  unsigned workers = 1;
  fs::path out;
};

inline json pose_line(const std::string& id, const std::string& pano_ref, const align::Panorama& p,
                      const align::AlignResult& r) {
  json line{{"id", id},
            {"panorama", pano_ref},
            {"reported", {{"x", p.reported_position.x}, {"y", p.reported_position.y}, {"z", p.nominal_height}}},
            {"heading_rad", p.heading},
            {"coarse",
             {{"dx", r.coarse.x},
              {"dy", r.coarse.y},
              {"z", r.coarse.z},
              {"ncc", r.coarse.ncc},
              {"prior", r.coarse.prior},
              {"total", r.coarse.total}}},
            {"fine", nullptr},
            {"pose", {{"x", r.pose.position.x}, {"y", r.pose.position.y}, {"z", r.pose.height}, {"heading_rad", r.pose.heading}}}};
  if (r.fine)
    line["fine"] = {{"dx", r.fine->displacement.x},
                    {"dy", r.fine->displacement.y},
                    {"inliers", r.fine->inliers},
                    {"samples", r.fine->samples}};
  return line;
}

// One JSON line per panorama, in sorted path order whatever the worker count.
inline int cmd_align(const AlignArgs& a, const io::Config& cfg, std::ostream& out) {
  align::AlignConfig ac;
  align::EdgeOptions eo = align::panorama_edge_options();
  bind(cfg, ac);
  bind(cfg, eo);
  const auto panos = find_files(a.panoramas, "panorama.png");
  if (panos.empty()) fail(ErrorCode::kMissingFile, "no panorama.png found under " + a.panoramas.string());
  std::optional<AerialMosaic> mosaic;
  if (a.aerial) mosaic = AerialMosaic::from_files(find_files(*a.aerial, "aerial.png"));
  std::optional<VectorMap> map;
  if (a.map) map = io::load_vector_map(*a.map);
  const fs::path root = fs::is_directory(a.panoramas) ? a.panoramas : a.panoramas.parent_path();

  std::vector<json> lines(panos.size());
  parallel_for(panos.size(), std::max(1u, a.workers), [&](std::size_t i) {
    const PanoramaFile pf = load_panorama(panos[i]);
    const align::Panorama& p = pf.panorama;
    geom::GeoGrid grid;
    ImageF aerial;
    if (mosaic) {
      aerial = mosaic->crop(p.reported_position, 0.5 * ac.rectified_extent + ac.search_xy + 1.0, grid);
    } else {
      const fs::path local = panos[i].parent_path() / "aerial.png";
      if (!fs::exists(local)) fail(ErrorCode::kMissingFile, "no --aerial given and no " + local.string());
      auto r = io::load_raster<float>(local);
      aerial = std::move(r.raster);
      grid = r.meta.grid;
    }
    std::optional<Mask> edges;
    if (a.edges) {
      auto e = io::load_raster<std::uint8_t>(*a.edges / (pf.id + ".png"));
      if (e.raster.width() != p.width() || e.raster.height() != p.height())
        fail(ErrorCode::kSchema, "edge raster for " + pf.id + " does not match the panorama size");
      align::EdgeOptions pass;
      pass.method = align::EdgeMethod::kPassthrough;
      edges = align::edge_map(e.raster, pass);
    }
    const auto r = align::align_panorama(p, aerial, grid, ac, map ? &map->curbs : nullptr, edges ? &*edges : nullptr, eo);
    lines[i] = pose_line(pf.id, fs::relative(panos[i], root).string(), p, r);
  });
  write_jsonl(a.out, lines);
  out << lines.size() << " poses -> " << a.out.string() << "\n";
  return 0;
}

}  // namespace urbanbench::cli
