#pragma once

#include "urbanbench/cli/cmd_align.hpp"
#include "urbanbench/geom/discretize.hpp"
#include "urbanbench/verify/http.hpp"

namespace urbanbench::cli {

namespace detail {

inline void dot(Mask& img, int c, int r, int rad, std::uint8_t v) {
  for (int y = r - rad; y <= r + rad; ++y)
    for (int x = c - rad; x <= c + rad; ++x)
      if (img.contains(x, y)) img(x, y) = v;
}

inline Mask to_gray8(const ImageF& img) {
  Mask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(static_cast<double>(img[i]), 0.0, 1.0) * 255.0));
  return out;
}

// Curbs projected from `pose` and drawn over the panorama.
inline Mask panorama_overlay(const align::Panorama& p, const std::vector<geom::Polyline>& curbs,
                             const align::CameraPose& pose, double max_range) {
  Mask img = to_gray8(p.pixels);
  const int w = p.width(), h = p.height();
  for (const auto& g : align::curb_samples(curbs, pose, w, h, 0.5, max_range)) {
    const geom::Point2 d = g - pose.position;
    const geom::Point2 uv = align::panorama_coords(d.x, d.y, pose.height, pose.heading, w, h);
    dot(img, static_cast<int>(std::floor(uv.x)), static_cast<int>(std::floor(uv.y)), 1, 255);
  }
  return img;
}

// Curbs over the aerial crop; a dark square marks the reported position and
// a bright disk the aligned one.
inline Mask aerial_overlay(const ImageF& aerial, const geom::GeoGrid& grid, const std::vector<geom::Polyline>& curbs,
                           geom::Point2 before, geom::Point2 after) {
  Mask img = to_gray8(aerial);
  for (const auto& c : curbs)
    for (const auto& q : geom::discretize(c, 0.5 * grid.resolution)) {
      const auto [x, y] = grid.pixel_of(q);
      if (img.contains(x, y)) img(x, y) = 255;
    }
  const int rad = std::max(2, static_cast<int>(std::lround(0.6 / grid.resolution)));
  const auto [bx, by] = grid.pixel_of(before);
  for (int k = -rad; k <= rad; ++k)
    for (int t : {-rad, rad}) {
      if (img.contains(bx + k, by + t)) img(bx + k, by + t) = 0;
      if (img.contains(bx + t, by + k)) img(bx + t, by + k) = 0;
    }
  const auto [ax, ay] = grid.pixel_of(after);
  for (int y = -rad / 2; y <= rad / 2; ++y)
    for (int x = -rad / 2; x <= rad / 2; ++x)
      if (x * x + y * y <= rad * rad / 4 && img.contains(ax + x, ay + y)) img(ax + x, ay + y) = 255;
  return img;
}

}  // namespace detail

struct VerifyPrepArgs {
  fs::path poses;
  fs::path panoramas;
  fs::path map;
  std::optional<fs::path> aerial;
  fs::path out;
};

// Before/after overlays for every aligned panorama plus items.jsonl for the
// review service. Paths in items.jsonl are relative to its directory.
inline int cmd_verify_prep(const VerifyPrepArgs& a, const io::Config& cfg, std::ostream& out) {
  align::AlignConfig ac;
  bind(cfg, ac);
  const VectorMap map = io::load_vector_map(a.map);
  std::optional<AerialMosaic> mosaic;
  if (a.aerial) mosaic = AerialMosaic::from_files(find_files(*a.aerial, "aerial.png"));
  std::vector<json> items;
  for (const auto& line : read_jsonl(a.poses)) {
    for (const char* k : {"id", "panorama", "pose"})
      if (!line.contains(k)) fail(ErrorCode::kSchema, a.poses.string() + ": pose line lacks '" + k + "'");
    const std::string id = line["id"].get<std::string>();
    const fs::path pano_path = a.panoramas / line["panorama"].get<std::string>();
    const PanoramaFile pf = load_panorama(pano_path);
    const align::Panorama& p = pf.panorama;
    const json& q = line["pose"];
    const align::CameraPose before{p.reported_position, p.nominal_height, p.heading};
    const align::CameraPose after{{q["x"].get<double>(), q["y"].get<double>()}, q["z"].get<double>(),
                                  q.value("heading_rad", p.heading)};
    const double range = ac.curb_max_range + 10.0;
    const auto near = align::curbs_near(map.curbs, p.reported_position, range + ac.search_xy);
    const fs::path dir = a.out / id;
    io::save_raster(dir / "before.png", detail::panorama_overlay(p, near, before, range), {{{0, 0}, 1.0, p.width(), p.height()}, 8, 1.0, 0.0, "overlay"});
    io::save_raster(dir / "after.png", detail::panorama_overlay(p, near, after, range), {{{0, 0}, 1.0, p.width(), p.height()}, 8, 1.0, 0.0, "overlay"});
    geom::GeoGrid grid;
    ImageF aerial;
    if (mosaic) {
      aerial = mosaic->crop(p.reported_position, 30.0, grid);
    } else {
      auto r = io::load_raster<float>(pano_path.parent_path() / "aerial.png");
      aerial = std::move(r.raster);
      grid = r.meta.grid;
    }
    io::save_raster(dir / "aerial.png", detail::aerial_overlay(aerial, grid, near, before.position, after.position),
                    {grid, 8, 1.0, 0.0, "overlay"});
    items.push_back({{"id", id},
                     {"panorama", fs::relative(pano_path, a.out).string()},
                     {"pose_before", {{"x", before.position.x}, {"y", before.position.y}, {"z", before.height}}},
                     {"pose_after", q},
                     {"overlays",
                      {{"before", (fs::path(id) / "before.png").string()},
                       {"after", (fs::path(id) / "after.png").string()},
                       {"aerial", (fs::path(id) / "aerial.png").string()}}}});
  }
  write_jsonl(a.out / "items.jsonl", items);
  out << items.size() << " verification items -> " << (a.out / "items.jsonl").string() << "\n";
  return 0;
}

// Items from items.jsonl with overlay paths resolved against its directory.
inline std::vector<verify::VerificationItem> load_items(const fs::path& path) {
  std::vector<verify::VerificationItem> items;
  for (const auto& j : read_jsonl(path)) {
    auto it = verify::item_from_json(j);
    for (auto& [_, p] : it.overlays)
      if (fs::path(p).is_relative()) p = (path.parent_path() / p).string();
    items.push_back(std::move(it));
  }
  return items;
}

struct ServeArgs {
  fs::path items;
  std::optional<fs::path> journal;
  std::string host = "127.0.0.1";
  int port = 8080;
};

inline int cmd_serve_verify(const ServeArgs& a, const io::Config&, std::ostream& out) {
  const fs::path journal = a.journal.value_or(a.items.parent_path() / "decisions.jsonl");
  verify::VerifyService svc(load_items(a.items), journal);
  httplib::Server server;
  verify::register_routes(server, svc);
  const int port = a.port == 0 ? server.bind_to_any_port(a.host) : (server.bind_to_port(a.host, a.port) ? a.port : -1);
  if (port < 0) fail(ErrorCode::kInvalidArgument, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  out << "serving " << svc.size() << " items on http://" << a.host << ":" << port << " (journal " << journal.string()
      << ")" << std::endl;
  server.listen_after_bind();
  return 0;
}

}  // namespace urbanbench::cli
