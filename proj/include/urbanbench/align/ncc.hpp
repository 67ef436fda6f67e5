#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>
#include <vector>

#include "urbanbench/core/error.hpp"
#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"

namespace urbanbench::align {

enum class NccMethod { kFft, kDirect };

namespace detail {

// Per-pixel variance at or below this (relative to the mean) counts as flat.
inline bool flat(double var, double mean) { return var <= 1e-12 * (1.0 + mean * mean); }

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// Two-pass normalized cross correlation; 0 when either input is flat.
template <typename A, typename B>
double ncc(const Raster<A>& a, const Raster<B>& b) {
  require(a.same_shape(b), "ncc inputs must have equal dimensions");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db, saa += da * da, sbb += db * db;
  }
  if (detail::flat(saa / n, ma) || detail::flat(sbb / n, mb)) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// NCC of `tmpl` against every placement fully inside `search`. Result pixel
// (dx, dy) scores the window whose top-left corner is search(dx, dy).
template <typename A, typename B>
Image ncc_placements(const Raster<A>& tmpl, const Raster<B>& search, NccMethod method = NccMethod::kFft) {
  const int m = tmpl.height(), n = tmpl.width(), M = search.height(), N = search.width();
  require(m > 0 && n > 0 && m <= M && n <= N, "template must fit inside the search image");
  const int pw = N - n + 1, ph = M - m + 1;
  Image out(pw, ph, 0.0);
  const double count = static_cast<double>(m) * n;

  if (method == NccMethod::kDirect) {
    Raster<B> win(n, m);
    for (int dy = 0; dy < ph; ++dy)
      for (int dx = 0; dx < pw; ++dx) {
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < n; ++c) win(c, r) = search(dx + c, dy + r);
        out(dx, dy) = ncc(tmpl, win);
      }
    return out;
  }

  double tm = 0.0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) tm += tmpl[i];
  tm /= count;
  double tss = 0.0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) tss += (tmpl[i] - tm) * (tmpl[i] - tm);
  if (detail::flat(tss / count, tm)) return out;

  // Window sums from integral images.
  const int W1 = N + 1;
  std::vector<double> s1(static_cast<std::size_t>(W1) * (M + 1), 0.0), s2(s1.size(), 0.0);
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < N; ++c) {
      const double v = search(c, r);
      const std::size_t i = static_cast<std::size_t>(r + 1) * W1 + (c + 1);
      s1[i] = v + s1[i - 1] + s1[i - W1] - s1[i - W1 - 1];
      s2[i] = v * v + s2[i - 1] + s2[i - W1] - s2[i - W1 - 1];
    }
  auto box = [&](const std::vector<double>& s, int c, int r) {
    auto at = [&](int cc, int rr) { return s[static_cast<std::size_t>(rr) * W1 + cc]; };
    return at(c + n, r + m) - at(c, r + m) - at(c + n, r) + at(c, r);
  };

  // Cross-correlation of the zero-mean template with the search image.
  const int nc = N / 2 + 1;
  const std::size_t real_size = static_cast<std::size_t>(M) * N, cplx_size = static_cast<std::size_t>(M) * nc;
  double* sa = fftw_alloc_real(real_size);
  double* ta = fftw_alloc_real(real_size);
  fftw_complex* sf = fftw_alloc_complex(cplx_size);
  fftw_complex* tf = fftw_alloc_complex(cplx_size);
  fftw_plan ps, pt, pinv;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    ps = fftw_plan_dft_r2c_2d(M, N, sa, sf, FFTW_ESTIMATE);
    pt = fftw_plan_dft_r2c_2d(M, N, ta, tf, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_2d(M, N, sf, sa, FFTW_ESTIMATE);
  }
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < N; ++c) {
      sa[static_cast<std::size_t>(r) * N + c] = search(c, r);
      ta[static_cast<std::size_t>(r) * N + c] = (r < m && c < n) ? tmpl(c, r) - tm : 0.0;
    }
  fftw_execute(ps);
  fftw_execute(pt);
  for (std::size_t i = 0; i < cplx_size; ++i) {
    const std::complex<double> a(sf[i][0], sf[i][1]), b(tf[i][0], -tf[i][1]);
    const std::complex<double> p = a * b;
    sf[i][0] = p.real();
    sf[i][1] = p.imag();
  }
  fftw_execute(pinv);
  const double scale = 1.0 / static_cast<double>(real_size);
  for (int dy = 0; dy < ph; ++dy)
    for (int dx = 0; dx < pw; ++dx) {
      const double sum = box(s1, dx, dy), mean = sum / count;
      const double ss = std::max(0.0, box(s2, dx, dy) - sum * mean);
      if (detail::flat(ss / count, mean)) continue;
      const double corr = sa[static_cast<std::size_t>(dy) * N + dx] * scale;
      out(dx, dy) = std::clamp(corr / std::sqrt(tss * ss), -1.0, 1.0);
    }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(ps);
    fftw_destroy_plan(pt);
    fftw_destroy_plan(pinv);
  }
  fftw_free(sa);
  fftw_free(ta);
  fftw_free(sf);
  fftw_free(tf);
  return out;
}

// Scores over a square window of whole-pixel offsets. Offset (ix, iy) pixels
// moves the ground raster by (ix, iy) * resolution in world x, y.
struct ScoreMap {
  int half = 0;
  double resolution = 0.0;
  Image scores;

  double at(int ix, int iy) const { return scores(ix + half, iy + half); }
};

// Places a geo-referenced ground raster over the aerial at every offset
// within +-half pixels and scores each placement. Both grids must share
// resolution and pixel lattice.
template <typename A, typename B>
ScoreMap ncc_score_map(const Raster<A>& ground, const geom::GeoGrid& ground_grid, const Raster<B>& aerial,
                       const geom::GeoGrid& aerial_grid, int half, NccMethod method = NccMethod::kFft) {
  require(ground.width() == ground_grid.width && ground.height() == ground_grid.height, "ground raster does not match its grid");
  require(aerial.width() == aerial_grid.width && aerial.height() == aerial_grid.height, "aerial raster does not match its grid");
  require(half >= 0, "search window must be non-negative");
  const double res = aerial_grid.resolution;
  require(std::abs(ground_grid.resolution - res) <= 1e-9 * res, "ground and aerial resolutions differ");
  const double fc = (ground_grid.origin.x - aerial_grid.origin.x) / res;
  const double fr = aerial_grid.height - (ground_grid.origin.y - aerial_grid.origin.y) / res - ground_grid.height;
  require(std::abs(fc - std::round(fc)) < 1e-6 && std::abs(fr - std::round(fr)) < 1e-6,
          "ground grid is not aligned with the aerial pixel lattice");
  const long col0 = std::lround(fc), row0 = std::lround(fr);
  const long c_lo = col0 - half, r_lo = row0 - half;
  const long c_hi = col0 + half + ground.width(), r_hi = row0 + half + ground.height();
  const long short_px = std::max({-c_lo, -r_lo, c_hi - aerial.width(), r_hi - aerial.height(), 0L});
  if (short_px > 0) {
    fail(ErrorCode::kMargin, "aerial tile too small: ground footprint plus a +-" + std::to_string(half * res) +
                                 " m search window needs " + std::to_string(short_px * res) + " m more margin");
  }
  Raster<B> crop(static_cast<int>(c_hi - c_lo), static_cast<int>(r_hi - r_lo));
  for (int r = 0; r < crop.height(); ++r)
    for (int c = 0; c < crop.width(); ++c) crop(c, r) = aerial(static_cast<int>(c_lo + c), static_cast<int>(r_lo + r));
  const Image placements = ncc_placements(ground, crop, method);
  ScoreMap out{half, res, Image(2 * half + 1, 2 * half + 1)};
  // Moving north by one pixel moves the window up one row.
  for (int iy = -half; iy <= half; ++iy)
    for (int ix = -half; ix <= half; ++ix) out.scores(ix + half, iy + half) = placements(ix + half, half - iy);
  return out;
}

}  // namespace urbanbench::align
