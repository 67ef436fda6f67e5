#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::extract {

namespace detail {

// Neighbours in Zhang-Suen order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline std::array<std::uint8_t, 8> ring8(const Mask& m, int c, int r) {
  std::array<std::uint8_t, 8> p{};
  for (int k = 0; k < 8; ++k) {
    const int x = c + kNx[k], y = r + kNy[k];
    p[k] = (x >= 0 && y >= 0 && x < m.width() && y < m.height() && m(x, y)) ? 1 : 0;
  }
  return p;
}

// Number of 8-connected groups formed by the foreground neighbours, where
// neighbours are linked only through each other.
inline int neighbour_groups(const std::array<std::uint8_t, 8>& p) {
  int groups = 0;
  std::array<bool, 8> seen{};
  for (int s = 0; s < 8; ++s) {
    if (!p[s] || seen[s]) continue;
    ++groups;
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < 8; ++b) {
        if (!p[b] || seen[b]) continue;
        if (std::abs(kNx[a] - kNx[b]) <= 1 && std::abs(kNy[a] - kNy[b]) <= 1) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
  }
  return groups;
}

}  // namespace detail

// Zhang-Suen thinning. Only pixels next to the background are examined in
// each sub-iteration; the candidate list grows around deleted pixels.
inline Mask thin(const Mask& input) {
  Mask m = input;
  const int w = m.width(), h = m.height();
  Mask queued(w, h);
  std::vector<std::uint32_t> cand;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!m(c, r)) continue;
      const auto p = detail::ring8(m, c, r);
      if (p[0] && p[2] && p[4] && p[6]) continue;
      cand.push_back(static_cast<std::uint32_t>(m.index(c, r)));
      queued(c, r) = 1;
    }
  std::vector<std::uint32_t> del, next;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      del.clear();
      next.clear();
      for (auto i : cand) {
        const int c = static_cast<int>(i % static_cast<std::uint32_t>(w));
        const int r = static_cast<int>(i / static_cast<std::uint32_t>(w));
        const auto p = detail::ring8(m, c, r);
        int b = 0, a = 0;
        for (int k = 0; k < 8; ++k) {
          b += p[k];
          a += (!p[k] && p[(k + 1) % 8]);
        }
        const bool ok = b >= 2 && b <= 6 && a == 1 &&
                        (pass == 0 ? (!(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6]))
                                   : (!(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6])));
        if (ok) {
          del.push_back(i);
        } else {
          next.push_back(i);
        }
      }
      if (del.empty()) {
        cand.swap(next);
        continue;
      }
      changed = true;
      for (auto i : del) {
        m[i] = 0;
        queued[i] = 0;
      }
      for (auto i : del) {
        const int c = static_cast<int>(i % static_cast<std::uint32_t>(w));
        const int r = static_cast<int>(i / static_cast<std::uint32_t>(w));
        for (int k = 0; k < 8; ++k) {
          const int x = c + detail::kNx[k], y = r + detail::kNy[k];
          if (x < 0 || y < 0 || x >= w || y >= h || !m(x, y) || queued(x, y)) continue;
          queued(x, y) = 1;
          next.push_back(static_cast<std::uint32_t>(m.index(x, y)));
        }
      }
      cand.swap(next);
    }
  }
  return m;
}

namespace detail {

// Deletes staircase corners: pixels with exactly two neighbours that already
// touch each other.
inline void remove_redundant(Mask& s) {
  for (int r = 0; r < s.height(); ++r)
    for (int c = 0; c < s.width(); ++c) {
      if (!s(c, r)) continue;
      const auto p = ring8(s, c, r);
      int n = 0;
      for (auto v : p) n += v;
      if (n == 2 && neighbour_groups(p) == 1) s(c, r) = 0;
    }
}

struct PixelPath {
  std::vector<std::uint32_t> pixels;
  bool end_a = false;  // first pixel is a free end (degree 1)
  bool end_b = false;
};

struct Trace {
  std::vector<PixelPath> paths;
  LabelImage junction;                // 8-connected clusters of pixels with degree >= 3, 1-based
  std::vector<geom::Point2> centers;  // mean (col, row) per cluster
};

inline Trace trace_paths(const Mask& s) {
  const int w = s.width(), h = s.height();
  auto degree = [&](int c, int r) {
    int n = 0;
    for (int k = 0; k < 8; ++k) {
      const int x = c + kNx[k], y = r + kNy[k];
      n += (x >= 0 && y >= 0 && x < w && y < h && s(x, y)) ? 1 : 0;
    }
    return n;
  };
  Raster<std::uint8_t> deg(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (s(c, r)) deg(c, r) = static_cast<std::uint8_t>(degree(c, r));

  Trace result;
  result.junction = LabelImage(w, h, 0);
  {
    std::vector<std::pair<int, int>> stack;
    int id = 0;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (!s(c, r) || deg(c, r) < 3 || result.junction(c, r)) continue;
        result.junction(c, r) = ++id;
        stack.push_back({c, r});
        double sc = 0, sr = 0, n = 0;
        while (!stack.empty()) {
          const auto [x, y] = stack.back();
          stack.pop_back();
          sc += x;
          sr += y;
          n += 1;
          for (int k = 0; k < 8; ++k) {
            const int u = x + kNx[k], v = y + kNy[k];
            if (u < 0 || v < 0 || u >= w || v >= h || !s(u, v) || deg(u, v) < 3 || result.junction(u, v)) continue;
            result.junction(u, v) = id;
            stack.push_back({u, v});
          }
        }
        result.centers.push_back({sc / n, sr / n});
      }
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, bool> used;
  auto key = [](std::uint32_t a, std::uint32_t b) { return std::pair{std::min(a, b), std::max(a, b)}; };
  auto idx = [&](int c, int r) { return static_cast<std::uint32_t>(s.index(c, r)); };
  // Links inside a junction cluster are not paths.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!result.junction(c, r)) continue;
      for (int k = 0; k < 8; ++k) {
        const int x = c + kNx[k], y = r + kNy[k];
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        if (result.junction(x, y) == result.junction(c, r)) used[key(idx(c, r), idx(x, y))] = true;
      }
    }
  std::vector<PixelPath>& out = result.paths;

  auto follow = [&](int c0, int r0, int c1, int r1) {
    PixelPath path;
    path.pixels = {idx(c0, r0)};
    path.end_a = deg(c0, r0) == 1;
    int pc = c0, pr = r0, c = c1, r = r1;
    used[key(idx(pc, pr), idx(c, r))] = true;
    while (true) {
      path.pixels.push_back(idx(c, r));
      if (deg(c, r) != 2) break;
      int nc = -1, nr = -1;
      for (int k = 0; k < 8; ++k) {
        const int x = c + kNx[k], y = r + kNy[k];
        if (x < 0 || y < 0 || x >= w || y >= h || !s(x, y)) continue;
        if (x == pc && y == pr) continue;
        nc = x;
        nr = y;
      }
      if (nc < 0 || used.count(key(idx(c, r), idx(nc, nr)))) break;
      used[key(idx(c, r), idx(nc, nr))] = true;
      pc = c;
      pr = r;
      c = nc;
      r = nr;
    }
    path.end_b = deg(c, r) == 1;
    out.push_back(std::move(path));
  };

  for (int pass = 0; pass < 2; ++pass)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (!s(c, r)) continue;
        // Nodes first, then whatever remains (closed loops).
        if (pass == 0 && deg(c, r) == 2) continue;
        for (int k = 0; k < 8; ++k) {
          const int x = c + kNx[k], y = r + kNy[k];
          if (x < 0 || y < 0 || x >= w || y >= h || !s(x, y)) continue;
          if (used.count(key(idx(c, r), idx(x, y)))) continue;
          follow(c, r, x, y);
        }
      }
  // Isolated pixels.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (s(c, r) && deg(c, r) == 0) out.push_back({{idx(c, r)}, true, true});
  return result;
}

inline double path_length(const PixelPath& p, int w) {
  double len = 0.0;
  for (std::size_t k = 1; k < p.pixels.size(); ++k) {
    const int dc = static_cast<int>(p.pixels[k] % w) - static_cast<int>(p.pixels[k - 1] % w);
    const int dr = static_cast<int>(p.pixels[k] / w) - static_cast<int>(p.pixels[k - 1] / w);
    len += std::hypot(dc, dr);
  }
  return len;
}

}  // namespace detail

struct MedialAxisOptions {
  double prune_length = 2.0;  // meters; shorter spurs and fragments are dropped
  int max_prune_rounds = 8;
};

// Skeleton of `mask` traced into world-space polylines split at junctions.
inline std::vector<geom::Polyline> medial_axis(const Mask& mask, const geom::GeoGrid& grid,
                                               const MedialAxisOptions& opt = {}) {
  require(mask.width() == grid.width && mask.height() == grid.height, "mask does not match grid");
  Mask s = thin(mask);
  detail::remove_redundant(s);
  const double prune_px = opt.prune_length / grid.resolution;
  for (int round = 0; round < opt.max_prune_rounds; ++round) {
    bool pruned = false;
    for (const auto& p : detail::trace_paths(s).paths) {
      if (!(p.end_a || p.end_b) || detail::path_length(p, s.width()) >= prune_px) continue;
      // Keep the junction pixel of a spur; drop a free fragment entirely.
      const bool fragment = p.end_a && p.end_b;
      for (std::size_t k = 0; k < p.pixels.size(); ++k) {
        const bool junction = (k == 0 && !p.end_a) || (k + 1 == p.pixels.size() && !p.end_b);
        if (fragment || !junction) s[p.pixels[k]] = 0;
      }
      pruned = true;
    }
    if (!pruned) break;
    detail::remove_redundant(s);
  }
  const auto trace = detail::trace_paths(s);

  std::vector<geom::Polyline> out;
  const auto w = static_cast<std::uint32_t>(s.width());
  auto center_of = [&](std::uint32_t i) {
    const geom::Point2 cr = trace.centers[static_cast<std::size_t>(trace.junction[i] - 1)];
    return grid.pixel_corner(cr.x + 0.5, cr.y + 0.5);
  };
  for (const auto& p : trace.paths) {
    if (p.pixels.size() < 2) continue;
    std::vector<geom::Point2> pts;
    // Paths ending in a junction cluster are extended to its center.
    if (trace.junction[p.pixels.front()]) pts.push_back(center_of(p.pixels.front()));
    for (auto i : p.pixels)
      if (!trace.junction[i]) pts.push_back(grid.pixel_center(static_cast<int>(i % w), static_cast<int>(i / w)));
    if (trace.junction[p.pixels.back()]) pts.push_back(center_of(p.pixels.back()));
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() >= 2) out.emplace_back(std::move(pts));
  }
  return out;
}

}  // namespace urbanbench::extract
