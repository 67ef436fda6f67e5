#pragma once

#include <vector>

#include "urbanbench/core/parallel.hpp"
#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/rasterize.hpp"
#include "urbanbench/road/polygonize.hpp"

namespace urbanbench::road {

struct RoadSurfaceOptions {
  PolygonizeOptions polygonize;
  double centerline_dontcare_width = 8.0;  // meters, around centerlines no curb was matched to
  unsigned workers = 1;
};

struct ChainReport {
  std::size_t segments = 0;
  bool closed = false;
  double energy = 0.0;
  std::size_t unmatched = 0;
};

struct RoadSurfaceReport {
  std::vector<ChainReport> chains;
  std::vector<int> unmatched_centerlines;  // segment ids
  double total_energy = 0.0;
};

struct RoadSurface {
  Mask road;
  Mask dontcare;
  std::vector<Polygon> polygons;
  std::vector<Polygon> dontcare_polygons;
  RoadSurfaceReport report;
};

// Chains, per-chain MRF inference and polygonization, then rasterization of
// the union onto `grid`. Chains are solved independently.
inline RoadSurface generate_road_surface(const std::vector<Polyline>& curbs, const CenterlineNetwork& net,
                                         const MrfParams& params, const geom::GeoGrid& grid,
                                         const RoadSurfaceOptions& opt = {}) {
  params.validate();
  grid.validate();
  RoadSurface out;
  out.road = Mask(grid.width, grid.height, 0);
  out.dontcare = Mask(grid.width, grid.height, 0);

  std::vector<CurbChain> chains;
  if (!curbs.empty()) chains = build_chains(curbs);
  std::vector<ChainPolygons> parts(chains.size());
  std::vector<Assignment> assignments(chains.size());
  parallel_for(chains.size(), opt.workers, [&](std::size_t c) {
    const auto cand = candidate_states(chains[c], net, params.K);
    assignments[c] = infer_assignment(chains[c], cand, net, params);
    parts[c] = polygonize(chains[c], assignments[c], net, opt.polygonize);
  });

  std::vector<char> used(net.size(), 0);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (int t : assignments[c].targets)
      if (t >= 0) used[static_cast<std::size_t>(t)] = 1;
    out.report.chains.push_back(
        {chains[c].size(), chains[c].closed, assignments[c].energy, parts[c].unmatched_segments.size()});
    out.report.total_energy += assignments[c].energy;
    for (auto& p : parts[c].polygons) out.polygons.push_back(std::move(p));
    for (auto& p : parts[c].dontcare) out.dontcare_polygons.push_back(std::move(p));
  }
  for (std::size_t s = 0; s < net.size(); ++s) {
    if (used[s]) continue;
    out.report.unmatched_centerlines.push_back(net[s].id);
    if (auto b = detail::segment_buffer(net[s].seg, 0.5 * opt.centerline_dontcare_width))
      out.dontcare_polygons.push_back(std::move(*b));
  }

  for (const auto& p : out.polygons) geom::fill_polygon(out.road, grid, p);
  for (const auto& p : out.dontcare_polygons) geom::fill_polygon(out.dontcare, grid, p);
  return out;
}

}  // namespace urbanbench::road
