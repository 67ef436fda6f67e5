#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "urbanbench/geom/types.hpp"

namespace urbanbench::road {

using geom::Point2;
using geom::Polyline;
using geom::Segment;

// A centerline polyline as it appears in the map, with optional topology ids
// for its end nodes. Polylines sharing a node id are connected even if their
// end coordinates differ slightly.
struct Centerline {
  Polyline line;
  std::optional<long> start_node;
  std::optional<long> end_node;
};

struct CenterlineSegment {
  int id = 0;
  Segment seg;
};

// Directed centerline segments plus a symmetric adjacency relation. Segment
// ids are unique; lookups below take positional indices.
class CenterlineNetwork {
 public:
  CenterlineNetwork() = default;

  CenterlineNetwork(std::vector<CenterlineSegment> segments,
                    const std::vector<std::pair<int, int>>& adjacent_ids)
      : segments_(std::move(segments)), adjacency_(segments_.size()) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const bool fresh = index_.emplace(segments_[i].id, i).second;
      require(fresh, "duplicate centerline segment id " + std::to_string(segments_[i].id),
              ErrorCode::kSchema);
    }
    for (auto [a, b] : adjacent_ids) connect(index_of(a), index_of(b));
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  // Splits polylines into segments (ids assigned in order) and connects
  // segments that share an end coordinate or an end node id.
  static CenterlineNetwork from_centerlines(const std::vector<Centerline>& lines) {
    std::vector<CenterlineSegment> segs;
    std::vector<std::pair<int, int>> adj;
    std::map<Point2, std::vector<int>> by_point;
    std::map<long, std::vector<int>> by_node;
    for (const auto& cl : lines) {
      const int first = static_cast<int>(segs.size());
      for (std::size_t k = 0; k < cl.line.segment_count(); ++k) {
        const int id = static_cast<int>(segs.size());
        segs.push_back({id, cl.line.segment(k)});
        by_point[segs.back().seg.a].push_back(id);
        by_point[segs.back().seg.b].push_back(id);
      }
      const int last = static_cast<int>(segs.size()) - 1;
      if (cl.start_node) by_node[*cl.start_node].push_back(first);
      if (cl.end_node) by_node[*cl.end_node].push_back(last);
    }
    auto clique = [&adj](const std::vector<int>& ids) {
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
          if (ids[i] != ids[j]) adj.emplace_back(ids[i], ids[j]);
    };
    for (const auto& [p, ids] : by_point) clique(ids);
    for (const auto& [n, ids] : by_node) clique(ids);
    return CenterlineNetwork(std::move(segs), adj);
  }

  std::size_t size() const noexcept { return segments_.size(); }
  bool empty() const noexcept { return segments_.empty(); }
  const CenterlineSegment& operator[](std::size_t i) const { return segments_[i]; }
  const std::vector<CenterlineSegment>& segments() const noexcept { return segments_; }
  const std::vector<int>& neighbors(std::size_t i) const { return adjacency_[i]; }

  std::size_t index_of(int id) const {
    auto it = index_.find(id);
    require(it != index_.end(), "unknown centerline segment id " + std::to_string(id));
    return it->second;
  }

  // Same segment counts as adjacent.
  bool adjacent(std::size_t i, std::size_t j) const {
    if (i == j) return true;
    const auto& adj = adjacency_[i];
    return std::binary_search(adj.begin(), adj.end(), static_cast<int>(j));
  }

  // Node shared by two adjacent segments: the closest pair of end points,
  // averaged when they do not coincide exactly.
  Point2 shared_node(std::size_t i, std::size_t j) const {
    const Segment& s = segments_[i].seg;
    const Segment& t = segments_[j].seg;
    const Point2 ps[2] = {s.a, s.b};
    const Point2 qs[2] = {t.a, t.b};
    double best = std::numeric_limits<double>::infinity();
    Point2 node = s.a;
    for (Point2 p : ps)
      for (Point2 q : qs)
        if (const double d = geom::dist2(p, q); d < best) {
          best = d;
          node = 0.5 * (p + q);
        }
    return node;
  }

 private:
  void connect(std::size_t i, std::size_t j) {
    if (i == j) return;
    adjacency_[i].push_back(static_cast<int>(j));
    adjacency_[j].push_back(static_cast<int>(i));
  }

  std::vector<CenterlineSegment> segments_;
  std::vector<std::vector<int>> adjacency_;
  std::unordered_map<int, std::size_t> index_;
};

// Ordered curb segments; consecutive segments share an end point and a
// closed chain also wraps from the last segment back to the first.
struct CurbChain {
  std::vector<Segment> segments;
  bool closed = false;

  std::size_t size() const noexcept { return segments.size(); }
};

// Splits the curb network at every vertex whose degree is not two, so each
// chain is a simple path or a simple loop. Every input segment lands in
// exactly one chain.
inline std::vector<CurbChain> build_chains(const std::vector<Polyline>& curbs) {
  require(!curbs.empty(), "build_chains needs at least one curb polyline");
  std::vector<Segment> edges;
  for (const auto& c : curbs)
    for (std::size_t k = 0; k < c.segment_count(); ++k) edges.push_back(c.segment(k));

  std::map<Point2, int> node_of;
  std::vector<Point2> nodes;
  auto node = [&](Point2 p) {
    auto [it, fresh] = node_of.emplace(p, static_cast<int>(nodes.size()));
    if (fresh) nodes.push_back(p);
    return it->second;
  };
  std::vector<std::pair<int, int>> ends(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) ends[e] = {node(edges[e].a), node(edges[e].b)};

  std::vector<std::vector<int>> incident(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[ends[e].first].push_back(static_cast<int>(e));
    incident[ends[e].second].push_back(static_cast<int>(e));
  }

  std::vector<char> used(edges.size(), 0);
  std::vector<CurbChain> chains;

  // Walks from `start` through degree-2 nodes; returns the traversed segments.
  auto walk = [&](int start, int first_edge) {
    CurbChain chain;
    int at = start;
    int e = first_edge;
    while (true) {
      used[e] = 1;
      const auto [u, v] = ends[e];
      const int next = (u == at) ? v : u;
      chain.segments.push_back({nodes[at], nodes[next]});
      at = next;
      if (incident[at].size() != 2) break;
      const int cand = incident[at][0] == e ? incident[at][1] : incident[at][0];
      if (used[cand]) {
        chain.closed = (at == start);
        break;
      }
      e = cand;
    }
    return chain;
  };

  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (incident[n].size() == 2) continue;
    for (int e : incident[n])
      if (!used[e]) chains.push_back(walk(static_cast<int>(n), e));
  }
  // Whatever is left consists of loops through degree-2 nodes only.
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (used[e]) continue;
    CurbChain chain = walk(ends[e].first, static_cast<int>(e));
    chain.closed = true;
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace urbanbench::road
