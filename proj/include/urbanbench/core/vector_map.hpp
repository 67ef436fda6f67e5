#pragma once

#include <optional>
#include <vector>

#include "urbanbench/geom/types.hpp"
#include "urbanbench/road/network.hpp"

namespace urbanbench {

enum class ZoneType : std::uint8_t { kNone = 0, kResidential = 1, kOthers = 2, kOpenSpace = 3 };

struct MapCenterline {
  int id = 0;
  geom::Polyline line;
  std::optional<long> start_node;
  std::optional<long> end_node;
  double width = 0.0;  // meters, 0 if unknown
};

struct MapBuilding {
  int id = 0;
  geom::Polygon footprint;
  double height = 0.0;  // meters, 0 if unknown
};

struct MapBlock {
  int id = 0;
  geom::Polygon boundary;  // curb ring
  ZoneType zone = ZoneType::kNone;
};

// Vector map in projected meters. When `road_outer` is present the true road
// surface is road_outer minus every block.
struct VectorMap {
  geom::Point2 origin;
  double extent_x = 0.0;
  double extent_y = 0.0;
  std::vector<MapCenterline> centerlines;
  std::vector<geom::Polyline> curbs;
  std::vector<MapBuilding> buildings;
  std::vector<MapBlock> blocks;
  std::optional<geom::Polygon> road_outer;

  std::vector<road::Centerline> road_centerlines() const {
    std::vector<road::Centerline> out;
    for (const auto& c : centerlines) out.push_back({c.line, c.start_node, c.end_node});
    return out;
  }

  std::vector<geom::Polyline> centerline_polylines() const {
    std::vector<geom::Polyline> out;
    for (const auto& c : centerlines) out.push_back(c.line);
    return out;
  }
};

}  // namespace urbanbench
