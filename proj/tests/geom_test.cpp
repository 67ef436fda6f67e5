#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"
#include "urbanbench/geom.hpp"

namespace {

using namespace urbanbench;
using namespace urbanbench::geom;
constexpr double kPi = std::numbers::pi;

// Textbook recursive Ramer-Douglas-Peucker over pts[lo..hi]; appends kept
// vertices except pts[hi].
void rdp_reference(const std::vector<Point2>& pts, std::size_t lo, std::size_t hi, double eps,
                   std::vector<Point2>& out) {
  double dmax = -1.0;
  std::size_t idx = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const Point2 a = pts[lo], b = pts[hi], p = pts[k];
    const Point2 d = b - a;
    const double len2 = d.x * d.x + d.y * d.y;
    double t = len2 > 0 ? ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2 : 0.0;
    t = std::max(0.0, std::min(1.0, t));
    const double dd = std::hypot(p.x - (a.x + t * d.x), p.y - (a.y + t * d.y));
    if (dd > dmax) {
      dmax = dd;
      idx = k;
    }
  }
  if (hi > lo + 1 && dmax > eps) {
    rdp_reference(pts, lo, idx, eps, out);
    rdp_reference(pts, idx, hi, eps, out);
  } else {
    out.push_back(pts[lo]);
  }
}

std::vector<Point2> noisy_circle(std::mt19937_64& rng, int n, double radius, double sigma) {
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * k / n;
    pts.push_back({radius * std::cos(t) + noise(rng), radius * std::sin(t) + noise(rng)});
  }
  return pts;
}

double distance_to_polyline(Point2 p, const std::vector<Point2>& chain, bool closed) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = closed ? chain.size() : chain.size() - 1;
  for (std::size_t i = 0; i < m; ++i)
    best = std::min(best, point_segment_distance(p, {chain[i], chain[(i + 1) % chain.size()]}));
  return best;
}

TEST(GeoGrid, PixelCenterRoundTrip) {
  const GeoGrid g{{623000.0, 4833500.0}, 0.1, 37, 23};
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) {
      const auto [cc, rr] = g.pixel_of(g.pixel_center(c, r));
      ASSERT_EQ(cc, c);
      ASSERT_EQ(rr, r);
    }
  EXPECT_THROW((GeoGrid{{0, 0}, 0.0, 1, 1}.validate()), Error);
}

TEST(Polygon, NormalizesToCounterClockwise) {
  const Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(cw.area(), 0.0);
  EXPECT_DOUBLE_EQ(cw.area(), 1.0);
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}, {2, 2}}), Error);
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}}), Error);
}

TEST(Rdp, CollinearMidpointRemoved) {
  const Polygon sq({{0, 0}, {5, 0}, {10, 0}, {10, 10}, {0, 10}});
  const Polygon s = rdp_simplify(sq, 0.5);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s.area(), 100.0);
}

TEST(Rdp, ZeroToleranceIsIdentity) {
  const Polyline line({{0, 0}, {1, 0}, {1, 0}, {2, 0}, {3, 1}});
  const Polyline s = rdp_simplify(line, 0.0);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s, line);
  const Polygon sq({{0, 0}, {5, 0}, {10, 0}, {10, 10}, {0, 10}});
  EXPECT_EQ(rdp_simplify(sq, 0.0), sq);
}

TEST(Rdp, DegenerateInputRejected) {
  EXPECT_THROW(Polyline({{1, 1}, {1, 1}}), Error);
  EXPECT_THROW(rdp_simplify(Polyline({{0, 0}, {1, 0}}), -1.0), Error);
}

TEST(Rdp, NoisyCircleMatchesReferenceOpenChain) {
  std::mt19937_64 rng(7);
  const auto pts = noisy_circle(rng, 64, 20.0, 0.1);
  std::vector<Point2> expected;
  rdp_reference(pts, 0, pts.size() - 1, 0.5, expected);
  expected.push_back(pts.back());
  const Polyline got = rdp_simplify(Polyline(pts), 0.5);
  EXPECT_EQ(got.size(), expected.size());
  EXPECT_EQ(got.vertices(), expected);
}

TEST(Rdp, NoisyCircleMatchesReferenceClosedRing) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Polygon poly(noisy_circle(rng, 64, 20.0, 0.1));
    const auto& pts = poly.ring();
    // Reference: split at the diameter pair, simplify both halves recursively.
    std::size_t ai = 0, aj = 0;
    double best = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (dist(pts[i], pts[j]) > best) {
          best = dist(pts[i], pts[j]);
          ai = i;
          aj = j;
        }
    std::vector<Point2> first(pts.begin() + ai, pts.begin() + aj + 1);
    std::vector<Point2> second(pts.begin() + aj, pts.end());
    second.insert(second.end(), pts.begin(), pts.begin() + ai + 1);
    std::vector<Point2> kept;
    rdp_reference(first, 0, first.size() - 1, 0.5, kept);
    rdp_reference(second, 0, second.size() - 1, 0.5, kept);
    const Polygon got = rdp_simplify(poly, 0.5);
    EXPECT_EQ(got.size(), kept.size()) << "seed " << seed;
  }
}

TEST(RdpProperty, IdempotentAndWithinTolerance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> epsd(0.05, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = epsd(rng);
    const Polyline line = testutil::random_walk(rng, 5 + trial % 60, 1.0);
    const Polyline s = rdp_simplify(line, eps);
    EXPECT_EQ(rdp_simplify(s, eps), s);
    // One-sided Hausdorff from the original chain (densely sampled) to the output.
    for (const Point2& p : discretize(line, 0.05))
      ASSERT_LE(distance_to_polyline(p, s.vertices(), false), eps + 1e-9);

    const Polygon poly = testutil::random_star_polygon(rng, 8 + trial % 50, 5.0, 20.0);
    const Polygon ps = rdp_simplify(poly, eps);
    EXPECT_EQ(rdp_simplify(ps, eps), ps);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Segment e = poly.edge(i);
      for (int k = 0; k <= 20; ++k)
        ASSERT_LE(distance_to_polyline(e.a + (k / 20.0) * (e.b - e.a), ps.ring(), true), eps + 1e-9);
    }
  }
}

TEST(Discretize, UnitSegment) {
  const auto pts = discretize(Polyline({{0, 0}, {1, 0}}), 0.1);
  ASSERT_EQ(pts.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(pts[k].x, k * 0.1, 1e-12);
  EXPECT_EQ(pts.back(), (Point2{1, 0}));
}

TEST(Discretize, RemainderEndpointKept) {
  const auto pts = discretize(Polyline({{0, 0}, {0.25, 0}}), 0.1);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_NEAR(pts[1].x, 0.1, 1e-12);
  EXPECT_NEAR(pts[2].x, 0.2, 1e-12);
  EXPECT_EQ(pts[3].x, 0.25);
}

// Arc-length oracle: integrates |dγ/du| with a midpoint rule along each
// segment and places sample k by walking the accumulated length.
Point2 arc_length_oracle(const std::vector<Point2>& v, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const int steps = 1000;
    double len = 0.0;
    for (int q = 0; q < steps; ++q) len += std::hypot(v[i + 1].x - v[i].x, v[i + 1].y - v[i].y) / steps;
    if (s <= acc + len || i + 2 == v.size()) {
      const double t = (s - acc) / len;
      return {v[i].x + t * (v[i + 1].x - v[i].x), v[i].y + t * (v[i + 1].y - v[i].y)};
    }
    acc += len;
  }
  return v.back();
}

TEST(Discretize, LShapeMatchesArcLengthOracle) {
  const std::vector<Point2> v{{3, 4}, {23, 4}, {23, 21.3}};
  const Polyline line(v);
  ASSERT_NEAR(line.length(), 37.3, 1e-12);
  const auto pts = discretize(line, 0.1);
  ASSERT_EQ(pts.size(), 374u);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Point2 want = arc_length_oracle(v, std::min(37.3, k * 0.1));
    EXPECT_NEAR(pts[k].x, want.x, 1e-9);
    EXPECT_NEAR(pts[k].y, want.y, 1e-9);
  }
}

TEST(DiscretizeProperty, SampleCountForStraightSegments) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> len(0.01, 50.0);
  for (int i = 0; i < 500; ++i) {
    const double L = len(rng);
    const double step = 0.1;
    const auto pts = discretize(Polyline({{0, 0}, {L, 0}}), step);
    const auto full = static_cast<std::size_t>(std::floor(L / step + 1e-9));
    const bool remainder = L - full * step > 1e-9;
    EXPECT_EQ(pts.size(), full + 1 + (remainder ? 1 : 0)) << L;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) EXPECT_NEAR(pts[k].x - pts[k - 1].x, step, 1e-9);
    EXPECT_EQ(pts.front().x, 0.0);
    EXPECT_EQ(pts.back().x, L);
  }
}

TEST(Turning, UnitSquare) {
  const auto tf = turning_function(rectangle({0, 0}, {1, 1}));
  ASSERT_EQ(tf.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(tf.s[k], 0.25 * k, 1e-12);
    if (k > 0) { EXPECT_NEAR(tf.theta[k] - tf.theta[k - 1], kPi / 2, 1e-12); }
  }
  EXPECT_NEAR(tf.total_turn, 2 * kPi, 1e-9);
}

TEST(Turning, ScaleAndTranslationInvariant) {
  const Polygon sq = rectangle({0, 0}, {1, 1});
  const auto a = turning_function(sq);
  const auto b = turning_function(transformed(sq, 7.0, 0.0, {123.4, -56.7}));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.s[i], b.s[i], 1e-12);
    EXPECT_NEAR(a.theta[i], b.theta[i], 1e-12);
  }
}

TEST(Turning, RegularHexagon) {
  const auto tf = turning_function(regular_polygon(6, 3.0));
  ASSERT_EQ(tf.size(), 6u);
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(tf.s[k], k / 6.0, 1e-12);
    if (k > 0) { EXPECT_NEAR(tf.theta[k] - tf.theta[k - 1], kPi / 3, 1e-12); }
  }
  EXPECT_NEAR(tf.total_turn, 2 * kPi, 1e-9);
}

TEST(Turning, SelfIntersectingRejected) {
  const Polygon bowtie({{0, 0}, {4, 4}, {4, 0}, {0, 1}});
  EXPECT_FALSE(bowtie.is_simple());
  EXPECT_THROW(turning_function(bowtie), Error);
}

TEST(TurningDistance, StartPointAndRotationInvariant) {
  const Polygon sq({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  const Polygon rolled({{2, 2}, {0, 2}, {0, 0}, {2, 0}});
  EXPECT_NEAR(turning_distance(turning_function(sq), turning_function(rolled)), 0.0, 1e-9);
  const Polygon rot = transformed(sq, 1.0, 33.0 * kPi / 180.0, {5, 5});
  EXPECT_NEAR(turning_distance(turning_function(sq), turning_function(rot)), 0.0, 1e-9);
}

// Independent heading-at-arc-length evaluation used by the brute-force oracle.
double oracle_heading(const Polygon& p, double s) {
  const auto& r = p.ring();
  const double per = p.perimeter();
  double acc = 0.0;
  double heading = std::atan2(r[1].y - r[0].y, r[1].x - r[0].x);
  const double k = std::floor(s);
  s -= k;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 e = r[(i + 1) % r.size()] - r[i];
    if (i > 0) {
      const Point2 pe = r[i] - r[i - 1];
      heading += std::atan2(pe.x * e.y - pe.y * e.x, pe.x * e.x + pe.y * e.y);
    }
    acc += std::hypot(e.x, e.y) / per;
    if (s < acc) break;
  }
  return heading + k * 2 * kPi;
}

TEST(TurningDistance, MatchesDenseGridOracle) {
  const Polygon sq = rectangle({0, 0}, {1, 1});
  const Polygon rect = rectangle({0, 0}, {4, 1});
  const int samples = 20000;
  std::vector<double> hb(samples);
  for (int i = 0; i < samples; ++i) hb[i] = oracle_heading(sq, (i + 0.5) / samples);
  double best = std::numeric_limits<double>::infinity();
  for (int ti = 0; ti < 1000; ++ti) {
    const double t = ti * 1e-3;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < samples; ++i) {
      const double f = oracle_heading(rect, (i + 0.5) / samples + t) - hb[i];
      m1 += f / samples;
      m2 += f * f / samples;
    }
    for (double th = -4 * kPi; th <= 4 * kPi; th += 1e-3) best = std::min(best, m2 + 2 * th * m1 + th * th);
  }
  const double want = std::sqrt(best);
  const double got = turning_distance(turning_function(rect), turning_function(sq));
  EXPECT_NEAR(got, want, 1e-4);
  EXPECT_GT(got, 0.1);
}

TEST(TurningDistanceProperty, MetricAxioms) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = turning_function(testutil::random_star_polygon(rng, 3 + trial % 9, 2.0, 6.0));
    const auto b = turning_function(testutil::random_star_polygon(rng, 3 + (trial * 7) % 11, 2.0, 6.0));
    const auto c = turning_function(testutil::random_star_polygon(rng, 3 + (trial * 5) % 8, 2.0, 6.0));
    const double ab = turning_distance(a, b), ba = turning_distance(b, a);
    const double bc = turning_distance(b, c), ac = turning_distance(a, c);
    EXPECT_NEAR(turning_distance(a, a), 0.0, 1e-6);
    EXPECT_NEAR(ab, ba, 1e-6);
    EXPECT_LE(ac, ab + bc + 1e-6);
    EXPECT_GE(ab, 0.0);
  }
}

TEST(Rasterize, TenMeterSquareOnTenCentimeterGrid) {
  const GeoGrid g{{0, 0}, 0.1, 200, 200};
  const Mask m = rasterize(rectangle({5, 5}, {15, 15}), g);
  EXPECT_EQ(count_set(m), 10000u);
}

TEST(Rasterize, OutsideGridIsEmpty) {
  const GeoGrid g{{0, 0}, 0.1, 50, 50};
  EXPECT_EQ(count_set(rasterize(rectangle({100, 100}, {110, 120}), g)), 0u);
  EXPECT_EQ(count_set(rasterize(rectangle({-30, 1}, {-10, 3}), g)), 0u);
}

TEST(RasterizeProperty, CountTracksShoelaceArea) {
  std::mt19937_64 rng(9);
  const GeoGrid g{{0, 0}, 0.1, 600, 600};
  for (int trial = 0; trial < 100; ++trial) {
    const Polygon p = testutil::random_star_polygon(rng, 5 + trial % 30, 5.0, 28.0, {30, 30});
    const Mask m = rasterize(p, g);
    const double px = p.area() / (g.resolution * g.resolution);
    ASSERT_GE(px, 100.0);
    EXPECT_NEAR(static_cast<double>(count_set(m)), px, 0.01 * px);
    // Matches a per-pixel even-odd test exactly.
    for (int r = 0; r < g.height; r += 7)
      for (int c = 0; c < g.width; c += 7)
        ASSERT_EQ(m(c, r) != 0, point_in_ring(g.pixel_center(c, r), p.ring()));
    EXPECT_DOUBLE_EQ(mask_iou(m, rasterize(p, g)), 1.0);
  }
}

TEST(MaskIou, Fixtures) {
  Mask a(300, 100), b(300, 100), c(300, 100);
  for (int r = 0; r < 100; ++r)
    for (int x = 0; x < 100; ++x) {
      a(x, r) = 1;
      b(x + 50, r) = 1;
      c(x + 200, r) = 1;
    }
  EXPECT_DOUBLE_EQ(mask_iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(mask_iou(a, c), 0.0);
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 5000.0 / 15000.0);
  EXPECT_DOUBLE_EQ(mask_iou(Mask(4, 4), Mask(4, 4)), 1.0);
  EXPECT_THROW(mask_iou(Mask(4, 4), Mask(4, 5)), Error);
}

}  // namespace
