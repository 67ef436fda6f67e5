#pragma once

#include <vector>

#include "urbanbench/core/raster.hpp"

namespace urbanbench::extract {

struct Components {
  LabelImage labels;  // 0 = background, 1..count in row-major order of first pixel
  int count = 0;
};

inline Components connected_components(const Mask& m, int connectivity = 8) {
  require(connectivity == 4 || connectivity == 8, "connectivity must be 4 or 8");
  const int w = m.width(), h = m.height();
  Components out{LabelImage(w, h, 0), 0};
  std::vector<std::pair<int, int>> stack;
  const int n = connectivity == 8 ? 8 : 4;
  static constexpr int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!m(c, r) || out.labels(c, r)) continue;
      const int id = ++out.count;
      out.labels(c, r) = id;
      stack.push_back({c, r});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int k = 0; k < n; ++k) {
          const int nx = x + dx[k], ny = y + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (!m(nx, ny) || out.labels(nx, ny)) continue;
          out.labels(nx, ny) = id;
          stack.push_back({nx, ny});
        }
      }
    }
  return out;
}

}  // namespace urbanbench::extract
