#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_util.hpp"
#include "urbanbench/geom.hpp"
#include "urbanbench/road.hpp"

namespace {

using namespace urbanbench;
using namespace urbanbench::geom;
using namespace urbanbench::road;
using namespace oracles;

std::vector<Point2> line_points(Point2 a, Point2 b, int pieces) {
  std::vector<Point2> pts;
  for (int k = 0; k <= pieces; ++k) pts.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
  return pts;
}

TEST(BuildChains, ClosedRectangle) {
  const auto chains = build_chains({Polyline({{0, 0}, {10, 0}, {10, 5}, {0, 5}, {0, 0}})});
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_TRUE(chains[0].closed);
  EXPECT_EQ(chains[0].size(), 4u);
}

TEST(BuildChains, YSplitsIntoThree) {
  const auto chains = build_chains({Polyline({{0, 0}, {0, 5}, {0, 10}}), Polyline({{0, 0}, {5, -5}}),
                                    Polyline({{0, 0}, {-5, -5}, {-6, -9}})});
  ASSERT_EQ(chains.size(), 3u);
  std::size_t total = 0;
  for (const auto& c : chains) {
    EXPECT_FALSE(c.closed);
    total += c.size();
  }
  EXPECT_EQ(total, 5u);
}

TEST(BuildChains, ConsecutiveSegmentsShareEndpoints) {
  std::mt19937_64 rng(3);
  std::vector<Polyline> curbs;
  for (int k = 0; k < 6; ++k) curbs.push_back(testutil::random_walk(rng, 8, 2.0));
  curbs.push_back(Polyline({curbs[0].vertices()[3], curbs[1].vertices()[5], {50, 50}}));
  for (const auto& c : build_chains(curbs)) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) EXPECT_EQ(c.segments[i].b, c.segments[i + 1].a);
    if (c.closed) { EXPECT_EQ(c.segments.back().b, c.segments.front().a); }
  }
}

TEST(BuildChains, SegmentSetPreserved) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cell(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    // Polylines on a lattice share vertices, creating branches and loops.
    std::vector<Polyline> curbs;
    std::multiset<std::pair<Point2, Point2>> expected;
    std::set<std::pair<Point2, Point2>> seen_edges;
    for (int k = 0; k < 8; ++k) {
      std::vector<Point2> pts{{double(cell(rng)), double(cell(rng))}};
      for (int s = 0; s < 5; ++s) {
        Point2 q = pts.back();
        (s % 2 ? q.x : q.y) += (cell(rng) % 2 ? 1.0 : -1.0);
        const auto key = std::minmax(pts.back(), q);
        if (seen_edges.count(key)) break;
        seen_edges.insert(key);
        pts.push_back(q);
      }
      if (pts.size() < 2) continue;
      curbs.emplace_back(pts);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) expected.insert(std::minmax(pts[i], pts[i + 1]));
    }
    if (curbs.empty()) continue;
    std::multiset<std::pair<Point2, Point2>> got;
    for (const auto& c : build_chains(curbs))
      for (const auto& s : c.segments) got.insert(std::minmax(s.a, s.b));
    EXPECT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(Candidates, SingleSegmentNetwork) {
  const CenterlineNetwork net({{7, {{0, 0}, {10, 0}}}}, {});
  CurbChain chain{{{{0, 3}, {10, 3}}}, false};
  const auto cand = candidate_states(chain, net, 3);
  ASSERT_EQ(cand[0].size(), 1u);
  EXPECT_EQ(net[cand[0][0]].id, 7);
}

TEST(Candidates, KOnePicksNearestRoad) {
  const CenterlineNetwork net({{0, {{0, 0}, {100, 0}}}, {1, {{0, 20}, {100, 20}}}}, {});
  CurbChain chain{{{{0, 4}, {50, 4}}, {{50, 4}, {50, 16}}, {{50, 16}, {90, 16}}}, false};
  const auto cand = candidate_states(chain, net, 1);
  EXPECT_EQ(cand[0], std::vector<int>{0});
  EXPECT_EQ(cand[2], std::vector<int>{1});
}

TEST(Candidates, EmptyNetworkGivesNoMatchOnly) {
  const CenterlineNetwork net;
  CurbChain chain{{{{0, 4}, {50, 4}}, {{50, 4}, {50, 16}}}, false};
  const auto cand = candidate_states(chain, net, 5);
  for (const auto& c : cand) EXPECT_TRUE(c.empty());
  const auto y = infer_assignment(chain, cand, net, MrfParams{});
  EXPECT_EQ(y.states, (std::vector<int>{0, 0}));
  EXPECT_DOUBLE_EQ(y.energy, 20.0);
}

TEST(Candidates, MatchesExhaustiveNearestK) {
  std::mt19937_64 rng(5);
  const auto chain = random_chain(rng, 50, false);
  const auto net = random_network(rng, 200, 60.0);
  const auto cand = candidate_states(chain, net, 5);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Segment& c = chain.segments[i];
    const Point2 m{(c.a.x + c.b.x) / 2, (c.a.y + c.b.y) / 2};
    std::vector<std::pair<double, int>> all;
    for (std::size_t j = 0; j < net.size(); ++j) {
      const Segment& r = net[j].seg;
      const double dx = r.b.x - r.a.x, dy = r.b.y - r.a.y;
      const double t = std::clamp(((m.x - r.a.x) * dx + (m.y - r.a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
      all.push_back({std::hypot(m.x - r.a.x - t * dx, m.y - r.a.y - t * dy), static_cast<int>(j)});
    }
    std::stable_sort(all.begin(), all.end());
    std::vector<int> expect;
    for (int k = 0; k < 5; ++k) expect.push_back(all[k].second);
    EXPECT_EQ(cand[i], expect) << "segment " << i;
  }
}

TEST(Unary, Fixtures) {
  const MrfParams p;
  EXPECT_DOUBLE_EQ(unary_cost({{0, 4}, {10, 4}}, {{0, 0}, {10, 0}}, p), 4.0);
  EXPECT_NEAR(unary_cost({{5, -1}, {5, 1}}, {{0, 0}, {10, 0}}, p), 2.0 * kPi / 2, 1e-12);
}

TEST(Unary, MatchesRecomputation) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-20, 20), w(0.1, 3.0);
  for (int k = 0; k < 500; ++k) {
    MrfParams p;
    p.w_dist = w(rng);
    p.w_angle = w(rng);
    const Segment c{{u(rng), u(rng)}, {u(rng), u(rng)}}, r{{u(rng), u(rng)}, {u(rng), u(rng)}};
    CurbChain chain{{c}, false};
    const CenterlineNetwork net({{0, r}}, {});
    const double expect = oracle_energy(chain, {{0}}, net, p, {1});
    EXPECT_NEAR(unary_cost(c, r, p), expect, 1e-9);
  }
}

TEST(Infer, SingleSegmentIsUnaryArgmin) {
  const CenterlineNetwork net({{0, {{0, 0}, {10, 0}}}, {1, {{0, 1}, {10, 9}}}}, {});
  CurbChain chain{{{{0, 3}, {10, 3}}}, false};
  const auto cand = candidate_states(chain, net, 2);
  const MrfParams p;
  const auto y = infer_assignment(chain, cand, net, p);
  const double u0 = unary_cost(chain.segments[0], net[cand[0][0]].seg, p);
  const double u1 = unary_cost(chain.segments[0], net[cand[0][1]].seg, p);
  const int expect = (u0 <= u1 ? 1 : 2);
  EXPECT_EQ(y.states[0], expect);
  EXPECT_DOUBLE_EQ(y.energy, std::min(u0, u1));
}

TEST(Infer, EightSegmentsMatchEnumeration) {
  std::mt19937_64 rng(21);
  for (bool closed : {false, true}) {
    const auto chain = random_chain(rng, 8, closed);
    const auto net = random_network(rng, 12, 15.0);
    const auto cand = candidate_states(chain, net, 3);
    MrfParams p;
    p.lambda_potts = 3.0;
    const auto y = infer_assignment(chain, cand, net, p);
    const auto [by, be] = brute_force(chain, cand, net, p);
    EXPECT_EQ(y.states, by);
    EXPECT_NEAR(y.energy, be, 1e-9);
  }
}

TEST(InferProperty, EqualsEnumerationOnSmallChains) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> len(1, 7), kk(1, 3);
  std::uniform_real_distribution<double> lam(0.0, 8.0), nm(1.0, 15.0);
  for (int trial = 0; trial < 60; ++trial) {
    const bool closed = trial % 2 == 1;
    const int n = closed ? std::max(3, len(rng)) : len(rng);
    const auto chain = random_chain(rng, n, closed);
    const auto net = random_network(rng, 10, 15.0);
    MrfParams p;
    p.K = kk(rng);
    p.lambda_potts = lam(rng);
    p.no_match_cost = nm(rng);
    const auto cand = candidate_states(chain, net, p.K);
    const auto y = infer_assignment(chain, cand, net, p);
    const auto [by, be] = brute_force(chain, cand, net, p);
    EXPECT_EQ(y.states, by) << "trial " << trial;
    EXPECT_NEAR(y.energy, be, 1e-9) << "trial " << trial;
  }
}

TEST(InferProperty, BeatsRandomLabelings) {
  std::mt19937_64 rng(77);
  for (bool closed : {false, true}) {
    const auto chain = random_chain(rng, 30, closed);
    const auto net = random_network(rng, 40, 20.0);
    MrfParams p;
    p.lambda_potts = 4.0;
    const auto cand = candidate_states(chain, net, p.K);
    const auto y = infer_assignment(chain, cand, net, p);
    for (int s = 0; s < 10000; ++s) {
      std::vector<int> r(chain.size());
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = std::uniform_int_distribution<int>(0, static_cast<int>(cand[i].size()))(rng);
      ASSERT_LE(y.energy, oracle_energy(chain, cand, net, p, r) + 1e-9);
    }
  }
}

TEST(InferProperty, LambdaMonotoneViolations) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto chain = random_chain(rng, 25, trial % 2 == 0);
    const auto net = random_network(rng, 30, 20.0);
    const auto cand = candidate_states(chain, net, 4);
    int prev = std::numeric_limits<int>::max();
    for (double lam : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 100.0}) {
      MrfParams p;
      p.K = 4;
      p.lambda_potts = lam;
      const auto y = infer_assignment(chain, cand, net, p);
      const int v = count_violations(chain, cand, net, y.states);
      EXPECT_LE(v, prev) << "trial " << trial << " lambda " << lam;
      prev = v;
    }
  }
}

// Curb along a through road whose dead-end side road starts 3 m short of it.
// The side road is closer for the segments facing it, but it is not connected.
TEST(Infer, IntersectionConnectivityPrior) {
  const CenterlineNetwork net({{1, {{0, 0}, {50, 0}}}, {2, {{50, 0}, {100, 0}}}, {3, {{50, 3}, {50, 40}}}},
                              {{1, 2}});
  CurbChain chain;
  const auto pts = line_points({45, 5}, {55, 5}, 10);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) chain.segments.push_back({pts[i], pts[i + 1]});
  const auto cand = candidate_states(chain, net, 3);
  const std::size_t side = net.index_of(3);

  for (double lam : {100.0, 0.0}) {
    MrfParams p;
    p.lambda_potts = lam;
    const auto y = infer_assignment(chain, cand, net, p);
    const auto [by, be] = brute_force(chain, cand, net, p);
    EXPECT_EQ(y.states, by);
    EXPECT_NEAR(y.energy, be, 1e-9);
    const auto n_side = std::count(y.targets.begin(), y.targets.end(), static_cast<int>(side));
    if (lam > 0) {
      EXPECT_EQ(n_side, 0);
      for (int t : y.targets) EXPECT_NE(t, -1);
    } else {
      EXPECT_EQ(n_side, 4);
    }
  }
}

struct StraightRoad {
  std::vector<Polyline> curbs;
  CenterlineNetwork net;
  GeoGrid grid{{-10, -10}, 0.1, 1200, 280};

  StraightRoad() {
    curbs.emplace_back(line_points({0, 0}, {100, 0}, 10));
    curbs.emplace_back(line_points({100, 8}, {0, 8}, 10));
    net = CenterlineNetwork::from_centerlines({{Polyline(line_points({0, 4}, {100, 4}, 4)), {}, {}}});
  }
};

TEST(Polygonize, StraightRoadIsRectangle) {
  const StraightRoad road;
  const auto out = generate_road_surface(road.curbs, road.net, MrfParams{}, road.grid);
  const Mask expect = rasterize(rectangle({0, 0}, {100, 8}), road.grid);
  EXPECT_GE(mask_iou(out.road, expect), 0.99);
  EXPECT_TRUE(out.report.unmatched_centerlines.empty());
  EXPECT_EQ(count_set(out.dontcare), 0u);
}

TEST(Polygonize, BothCurbsMatchOneCenterline) {
  const StraightRoad road;
  for (const auto& chain : build_chains(road.curbs)) {
    const auto cand = candidate_states(chain, road.net, 5);
    const auto y = infer_assignment(chain, cand, road.net, MrfParams{});
    for (int t : y.targets) EXPECT_GE(t, 0);
  }
}

TEST(Polygonize, UnmatchedChainIsDontCare) {
  const StraightRoad road;
  MrfParams p;
  p.no_match_cost = 0.0;
  const auto chains = build_chains({road.curbs[0]});
  const auto cand = candidate_states(chains[0], road.net, 5);
  const auto y = infer_assignment(chains[0], cand, road.net, p);
  const auto out = polygonize(chains[0], y, road.net);
  EXPECT_TRUE(out.polygons.empty());
  EXPECT_EQ(out.unmatched_segments.size(), chains[0].size());
  EXPECT_EQ(out.dontcare.size(), chains[0].size());
}

TEST(RoadSurface, EmptyNetwork) {
  const StraightRoad road;
  const auto out = generate_road_surface(road.curbs, CenterlineNetwork{}, MrfParams{}, road.grid);
  EXPECT_EQ(count_set(out.road), 0u);
  EXPECT_GT(count_set(out.dontcare), 0u);
  for (const auto& c : out.report.chains) EXPECT_EQ(c.unmatched, c.segments);
}

// Two crossing 8 m roads with 4 m filleted corners.
struct CrossRoads {
  std::vector<Polyline> curbs;
  std::vector<Polygon> blocks;
  CenterlineNetwork net;
  GeoGrid grid{{-60, -60}, 0.1, 1200, 1200};

  CrossRoads() {
    for (int q = 0; q < 4; ++q) {
      const double sx = (q == 0 || q == 3) ? 1 : -1, sy = q < 2 ? 1 : -1;
      std::vector<Point2> pts;
      for (const Point2& p : line_points({50, 4}, {8, 4}, 12)) pts.push_back(p);
      for (int k = 1; k < 8; ++k) {
        const double a = -kPi / 2 - k * (kPi / 2) / 8;
        pts.push_back({8 + 4 * std::cos(a), 8 + 4 * std::sin(a)});
      }
      for (const Point2& p : line_points({4, 8}, {4, 50}, 12)) pts.push_back(p);
      for (auto& p : pts) p = {sx * p.x, sy * p.y};
      curbs.emplace_back(pts);
      pts.push_back({50 * sx, 50 * sy});
      blocks.emplace_back(pts);
    }
    std::vector<Centerline> lines;
    long node = 0;
    for (Point2 dir : {Point2{1, 0}, Point2{-1, 0}, Point2{0, 1}, Point2{0, -1}})
      lines.push_back({Polyline(line_points({0, 0}, 50.0 * dir, 5)), node, ++node});
    net = CenterlineNetwork::from_centerlines(lines);
  }

  Mask truth() const {
    Mask m = rasterize(rectangle({-50, -50}, {50, 50}), grid);
    for (const auto& b : blocks) fill_polygon(m, grid, b, 0);
    return m;
  }
};

TEST(RoadSurface, CrossRoadsMatchesAnalyticMask) {
  const CrossRoads x;
  const auto out = generate_road_surface(x.curbs, x.net, MrfParams{}, x.grid);
  EXPECT_GE(mask_iou(out.road, x.truth()), 0.99);
  EXPECT_EQ(enclosed_background(out.road), 0);
}

TEST(RoadSurface, PolygonsNearlyDisjoint) {
  const CrossRoads x;
  const auto out = generate_road_surface(x.curbs, x.net, MrfParams{}, x.grid);
  Raster<int> cover(x.grid.width, x.grid.height);
  for (const auto& p : out.polygons) {
    const Mask m = rasterize(p, x.grid);
    for (std::size_t i = 0; i < m.size(); ++i) cover[i] += m[i];
  }
  std::size_t overlap = 0, uni = 0;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    overlap += cover[i] > 1;
    uni += cover[i] > 0;
  }
  EXPECT_LT(static_cast<double>(overlap), 0.005 * static_cast<double>(uni));
}

TEST(RoadSurface, WorkerCountDoesNotChangeResult) {
  const CrossRoads x;
  RoadSurfaceOptions serial, threaded;
  threaded.workers = 4;
  const auto a = generate_road_surface(x.curbs, x.net, MrfParams{}, x.grid, serial);
  const auto b = generate_road_surface(x.curbs, x.net, MrfParams{}, x.grid, threaded);
  EXPECT_EQ(a.road, b.road);
  EXPECT_EQ(a.polygons, b.polygons);
}

}  // namespace
