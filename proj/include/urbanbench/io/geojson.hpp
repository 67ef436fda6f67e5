#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "urbanbench/core/error.hpp"
#include "urbanbench/core/vector_map.hpp"

namespace urbanbench::io {

using nlohmann::json;

inline const char* zone_name(ZoneType z) {
  switch (z) {
    case ZoneType::kResidential: return "residential";
    case ZoneType::kOthers: return "others";
    case ZoneType::kOpenSpace: return "open_space";
    default: return "none";
  }
}

inline ZoneType parse_zone(const std::string& s) {
  if (s == "residential") return ZoneType::kResidential;
  if (s == "others") return ZoneType::kOthers;
  if (s == "open_space") return ZoneType::kOpenSpace;
  if (s == "none") return ZoneType::kNone;
  fail(ErrorCode::kSchema, "unknown zoning category '" + s + "'");
}

namespace detail {

inline json coords(const std::vector<geom::Point2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

inline json closed_ring(const std::vector<geom::Point2>& ring) {
  json a = coords(ring);
  a.push_back({ring.front().x, ring.front().y});
  return a;
}

inline json feature(json geometry, json props) {
  return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(props)}};
}

[[noreturn]] inline void bad(std::size_t i, const std::string& what) {
  fail(ErrorCode::kSchema, "feature " + std::to_string(i) + ": " + what);
}

inline std::vector<geom::Point2> read_coords(const json& a, std::size_t i) {
  if (!a.is_array()) bad(i, "coordinates must be an array");
  std::vector<geom::Point2> pts;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) bad(i, "position must be [x, y]");
    const geom::Point2 q{p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) bad(i, "coordinate is not finite");
    pts.push_back(q);
  }
  return pts;
}

inline const json& geometry_of(const json& f, std::size_t i, const char* type) {
  if (!f.contains("geometry") || !f["geometry"].is_object()) bad(i, "missing geometry");
  const json& g = f["geometry"];
  if (g.value("type", "") != type) bad(i, std::string("geometry must be a ") + type);
  if (!g.contains("coordinates")) bad(i, "missing coordinates");
  return g;
}

inline geom::Polyline read_line(const json& f, std::size_t i) {
  auto pts = read_coords(geometry_of(f, i, "LineString")["coordinates"], i);
  try {
    return geom::Polyline(std::move(pts));
  } catch (const Error& e) {
    bad(i, e.what());
  }
}

inline geom::Polygon read_polygon(const json& f, std::size_t i) {
  const json& rings = geometry_of(f, i, "Polygon")["coordinates"];
  if (!rings.is_array() || rings.size() != 1) bad(i, "polygon must have exactly one ring");
  auto pts = read_coords(rings[0], i);
  if (pts.size() < 4 || pts.front() != pts.back()) bad(i, "polygon ring must be closed with at least 4 positions");
  try {
    return geom::Polygon(std::move(pts));
  } catch (const Error& e) {
    bad(i, e.what());
  }
}

inline int read_id(const json& props, std::size_t i) {
  if (!props.contains("id")) return 0;
  if (!props["id"].is_number_integer()) bad(i, "id must be an integer");
  return props["id"].get<int>();
}

inline std::optional<long> read_node(const json& props, const char* key, std::size_t i) {
  if (!props.contains(key) || props[key].is_null()) return std::nullopt;
  if (!props[key].is_number_integer()) bad(i, std::string(key) + " must be an integer");
  return props[key].get<long>();
}

}  // namespace detail

// GeoJSON FeatureCollection in projected meters. properties.layer is one of
// curb, centerline, building, zoning; the map extent travels in "bbox".
inline json to_geojson(const VectorMap& map) {
  json features = json::array();
  for (const auto& c : map.centerlines) {
    json props{{"layer", "centerline"}, {"id", c.id}, {"width_m", c.width}};
    props["start_node"] = c.start_node ? json(*c.start_node) : json(nullptr);
    props["end_node"] = c.end_node ? json(*c.end_node) : json(nullptr);
    features.push_back(detail::feature({{"type", "LineString"}, {"coordinates", detail::coords(c.line.vertices())}}, props));
  }
  for (std::size_t k = 0; k < map.curbs.size(); ++k) {
    json props{{"layer", "curb"}};
    const auto& v = map.curbs[k].vertices();
    if (map.road_outer && k == 0 && map.curbs[k].closed() &&
        std::vector<geom::Point2>(v.begin(), v.end() - 1) == map.road_outer->ring())
      props["outer"] = true;
    features.push_back(detail::feature({{"type", "LineString"}, {"coordinates", detail::coords(v)}}, props));
  }
  // An outer ring that is not also the first curb travels on its own.
  const bool carried = !map.curbs.empty() && !features.empty() &&
                       features[map.centerlines.size()]["properties"].value("outer", false);
  if (map.road_outer && !carried) {
    std::vector<geom::Point2> ring = map.road_outer->ring();
    ring.push_back(ring.front());
    features.push_back(detail::feature({{"type", "LineString"}, {"coordinates", detail::coords(ring)}},
                                       {{"layer", "curb"}, {"outer", true}, {"boundary_only", true}}));
  }
  for (const auto& b : map.buildings)
    features.push_back(detail::feature({{"type", "Polygon"}, {"coordinates", json::array({detail::closed_ring(b.footprint.ring())})}},
                                       {{"layer", "building"}, {"id", b.id}, {"height_m", b.height > 0.0 ? json(b.height) : json(nullptr)}}));
  for (const auto& b : map.blocks)
    features.push_back(detail::feature({{"type", "Polygon"}, {"coordinates", json::array({detail::closed_ring(b.boundary.ring())})}},
                                       {{"layer", "zoning"}, {"id", b.id}, {"category", zone_name(b.zone)}}));
  return {{"type", "FeatureCollection"},
          {"bbox", {map.origin.x, map.origin.y, map.origin.x + map.extent_x, map.origin.y + map.extent_y}},
          {"features", features}};
}

inline VectorMap from_geojson(const json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
    fail(ErrorCode::kSchema, "vector map must be a GeoJSON FeatureCollection");
  if (!doc.contains("features") || !doc["features"].is_array()) fail(ErrorCode::kSchema, "missing features array");
  VectorMap map;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const json& f = doc["features"][i];
    if (!f.is_object() || f.value("type", "") != "Feature") detail::bad(i, "not a Feature");
    if (!f.contains("properties") || !f["properties"].is_object()) detail::bad(i, "missing properties");
    const json& props = f["properties"];
    if (!props.contains("layer") || !props["layer"].is_string()) detail::bad(i, "missing properties.layer");
    const std::string layer = props["layer"].get<std::string>();
    if (layer == "centerline") {
      MapCenterline c{detail::read_id(props, i), detail::read_line(f, i), detail::read_node(props, "start_node", i),
                      detail::read_node(props, "end_node", i), 0.0};
      if (props.contains("width_m")) {
        if (!props["width_m"].is_number() || props["width_m"].get<double>() < 0.0) detail::bad(i, "width_m must be a non-negative number");
        c.width = props["width_m"].get<double>();
      }
      map.centerlines.push_back(std::move(c));
    } else if (layer == "curb") {
      geom::Polyline line = detail::read_line(f, i);
      if (props.value("outer", false)) {
        if (!line.closed()) detail::bad(i, "outer curb must be a closed ring");
        try {
          map.road_outer = geom::Polygon(line.vertices());
        } catch (const Error& e) {
          detail::bad(i, e.what());
        }
        if (props.value("boundary_only", false)) continue;
      }
      map.curbs.push_back(std::move(line));
    } else if (layer == "building") {
      // null marks an unknown height, stored as 0.
      if (!props.contains("height_m") ||
          (!props["height_m"].is_null() && !(props["height_m"].is_number() && props["height_m"].get<double>() > 0.0)))
        detail::bad(i, "building needs a positive or null height_m");
      const double h = props["height_m"].is_null() ? 0.0 : props["height_m"].get<double>();
      map.buildings.push_back({detail::read_id(props, i), detail::read_polygon(f, i), h});
    } else if (layer == "zoning") {
      if (!props.contains("category") || !props["category"].is_string()) detail::bad(i, "zoning needs a category");
      ZoneType z;
      try {
        z = parse_zone(props["category"].get<std::string>());
      } catch (const Error& e) {
        detail::bad(i, e.what());
      }
      map.blocks.push_back({detail::read_id(props, i), detail::read_polygon(f, i), z});
    } else {
      detail::bad(i, "unknown layer '" + layer + "'");
    }
  }
  if (doc.contains("bbox")) {
    const json& b = doc["bbox"];
    if (!b.is_array() || b.size() != 4) fail(ErrorCode::kSchema, "bbox must be [minx, miny, maxx, maxy]");
    for (const auto& v : b)
      if (!v.is_number()) fail(ErrorCode::kSchema, "bbox must be numeric");
    map.origin = {b[0].get<double>(), b[1].get<double>()};
    map.extent_x = b[2].get<double>() - map.origin.x;
    map.extent_y = b[3].get<double>() - map.origin.y;
    if (!(map.extent_x >= 0.0 && map.extent_y >= 0.0)) fail(ErrorCode::kSchema, "bbox is inverted");
  } else {
    // Derive the extent from the data.
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    auto grow = [&](const std::vector<geom::Point2>& pts) {
      for (const auto& p : pts) x0 = std::min(x0, p.x), y0 = std::min(y0, p.y), x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    };
    for (const auto& c : map.centerlines) grow(c.line.vertices());
    for (const auto& c : map.curbs) grow(c.vertices());
    for (const auto& b : map.buildings) grow(b.footprint.ring());
    for (const auto& b : map.blocks) grow(b.boundary.ring());
    if (std::isfinite(x0)) map.origin = {x0, y0}, map.extent_x = x1 - x0, map.extent_y = y1 - y0;
  }
  return map;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kMissingFile, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kMissingFile, "write failed: " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
}

// A path given without extension also matches path.geojson.
inline std::filesystem::path resolve_geojson(const std::filesystem::path& p) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p) && fs::is_regular_file(p / "map.geojson")) return p / "map.geojson";
  fs::path q = p;
  q += ".geojson";
  if (fs::is_regular_file(q)) return q;
  fail(ErrorCode::kMissingFile, "no such vector file: " + p.string());
}

inline VectorMap load_vector_map(const std::filesystem::path& path) {
  const auto p = resolve_geojson(path);
  const json doc = read_json(p);
  try {
    return from_geojson(doc);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchema) fail(ErrorCode::kSchema, p.string() + ": " + e.what());
    throw;
  }
}

inline void save_vector_map(const std::filesystem::path& path, const VectorMap& map) {
  write_text(path, to_geojson(map).dump(1) + "\n");
}

}  // namespace urbanbench::io
