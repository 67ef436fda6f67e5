// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion names as
// arguments to run a subset. Exit status is 0 only if every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "urbanbench/align.hpp"
#include "urbanbench/cli/app.hpp"
#include "urbanbench/extract.hpp"
#include "urbanbench/metrics.hpp"
#include "urbanbench/road.hpp"
#include "urbanbench/synth.hpp"

namespace fs = std::filesystem;
using namespace urbanbench;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const VectorMap& seed1_city() {
  static const VectorMap map = [] {
    synth::CityParams p;
    p.seed = 1;
    return synth::generate_city(p);
  }();
  return map;
}

// 100 random chains with N <= 10 and K <= 3 against full enumeration.
Outcome dp_vs_brute_force() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> len(1, 10), kk(1, 3), netsize(3, 14);
  std::uniform_real_distribution<double> lam(0.0, 8.0), nm(1.0, 15.0);
  int agree = 0;
  double worst = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const bool closed = t % 2 == 1;
    const int n = closed ? std::max(3, len(rng)) : len(rng);
    const auto chain = oracles::random_chain(rng, n, closed);
    const auto net = oracles::random_network(rng, netsize(rng), 15.0);
    road::MrfParams p;
    p.K = kk(rng);
    p.lambda_potts = lam(rng);
    p.no_match_cost = nm(rng);
    const auto cand = road::candidate_states(chain, net, p.K);
    const auto y = road::infer_assignment(chain, cand, net, p);
    const auto [by, be] = oracles::brute_force(chain, cand, net, p);
    // Labels must match exactly, and so must the oracle's energy of them. The
    // energy the DP reports sums the same terms in another order.
    const double dp_diff = std::abs(y.energy - be);
    worst = std::max(worst, dp_diff);
    agree += y.states == by && oracles::oracle_energy(chain, cand, net, p, y.states) == be &&
             dp_diff <= 1e-9 * (1.0 + std::abs(be));
  }
  const double secs = seconds_since(t0);
  return {agree == trials && secs < 10.0,
          fmt("%d/%d chains with identical labels and optimal energy, max |dp - enumeration| energy %.2g, %.2f s "
              "(limit 10 s)",
              agree, trials, worst, secs)};
}

// 50 pairs of a 32x32 ground patch in a 128x128 aerial raster; every offset of
// the score map against a per-offset direct NCC.
Outcome fft_ncc_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(424242);
  constexpr int kG = 32, kA = 128, kHalf = (kA - kG) / 2;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const geom::GeoGrid agrid{{0.0, 0.0}, 0.25, kA, kA};
    const Image aerial = oracles::random_image(rng, kA, kA);
    const geom::GeoGrid ggrid{{kHalf * 0.25, kHalf * 0.25}, 0.25, kG, kG};
    const Image ground = oracles::random_image(rng, kG, kG);
    const align::ScoreMap f = align::ncc_score_map(ground, ggrid, aerial, agrid, kHalf, align::NccMethod::kFft);
    Image win(kG, kG);
    for (int iy = -kHalf; iy <= kHalf; ++iy)
      for (int ix = -kHalf; ix <= kHalf; ++ix) {
        for (int r = 0; r < kG; ++r)
          for (int c = 0; c < kG; ++c) win(c, r) = aerial(kHalf + ix + c, kHalf - iy + r);
        worst = std::max(worst, std::abs(f.at(ix, iy) - oracles::direct_ncc(ground, win)));
      }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 30.0, fmt("max |fft - direct| = %.3g (limit 1e-6), %.2f s (limit 30 s)", worst, secs)};
}

// 200 seed-1 fixtures with planted offsets drawn per axis from N(0, 1.5 m),
// redrawn beyond 5 m. Errors are Euclidean distances to the truth.
Outcome alignment_recovery() {
  const VectorMap& map = seed1_city();
  const int trials = 200;
  synth::FixtureOptions base;
  const double margin = 0.5 * base.aerial_extent + base.offset_max + 5.0;
  std::mt19937_64 rng(2024);
  align::AlignConfig cfg;
  int coarse_ok = 0, fine_ok = 0, fine_axis_ok = 0;
  double align_secs = 0.0, worst_fine = 0.0;
  std::vector<double> fine_err;
  for (int t = 0; t < trials; ++t) {
    const auto pose = synth::sample_road_pose(map, rng, margin);
    synth::FixtureOptions fo = base;
    fo.seed = 7000 + static_cast<std::uint64_t>(t);
    const auto fx = synth::make_panorama_fixture(map, pose, fo);
    const auto t0 = Clock::now();
    const auto r = align::align_panorama(fx.panorama, fx.aerial.image, fx.aerial.grid, cfg, &map.curbs);
    align_secs += seconds_since(t0);
    const double ce = geom::norm(geom::Point2{r.coarse.x, r.coarse.y} - fx.planted);
    if (ce > 0.1 + 1e-9) continue;
    ++coarse_ok;
    const double fe = geom::norm(r.pose.position - fx.true_pose.position);
    fine_err.push_back(fe);
    worst_fine = std::max(worst_fine, fe);
    fine_ok += fe <= 0.05 + 1e-9;
    const auto d = r.pose.position - fx.true_pose.position;
    fine_axis_ok += std::max(std::abs(d.x), std::abs(d.y)) <= 0.05 + 1e-9;
  }
  std::sort(fine_err.begin(), fine_err.end());
  const double median = fine_err.empty() ? 0.0 : fine_err[fine_err.size() / 2];
  const double coarse_rate = static_cast<double>(coarse_ok) / trials;
  const double fine_rate = coarse_ok ? static_cast<double>(fine_ok) / coarse_ok : 0.0;
  return {coarse_rate >= 0.95 && fine_rate >= 0.95 && align_secs < 600.0,
          fmt("coarse <= 0.1 m: %d/%d = %.1f%% (need 95%%); fine <= 0.05 m: %d/%d = %.1f%% of coarse successes "
              "(need 95%%), median %.3f m, worst %.3f m, per-axis %d/%d; alignment %.0f s single-threaded "
              "(limit 600 s)",
              coarse_ok, trials, 100.0 * coarse_rate, fine_ok, coarse_ok, 100.0 * fine_rate, median, worst_fine,
              fine_axis_ok, coarse_ok, align_secs)};
}

// Road surface from the seed-1 curbs and centerlines against the generator's
// road raster, plus background pockets left inside the road area.
Outcome road_surface_oracle() {
  const VectorMap& map = seed1_city();
  const double res = 0.25;
  const int w = static_cast<int>(std::lround(map.extent_x / res)), h = static_cast<int>(std::lround(map.extent_y / res));
  const geom::GeoGrid grid{map.origin, res, w, h};
  const auto net = road::CenterlineNetwork::from_centerlines(map.road_centerlines());
  const auto rs = road::generate_road_surface(map.curbs, net, road::MrfParams{}, grid);
  synth::RenderOptions ro;
  ro.texture = false;
  const auto tile = synth::render_aerial(map, grid, ro);
  Mask gt(w, h, 0);
  for (std::size_t i = 0; i < gt.size(); ++i) gt[i] = tile.semantic[i] == synth::kRoad;
  const double iou = geom::mask_iou(rs.road, gt);
  const int holes = oracles::holes_inside(rs.road, gt);
  return {iou >= 0.95 && holes == 0,
          fmt("IoU %.4f (need 0.95) at %.2f m; %d holes inside the road area (need 0)", iou, res, holes)};
}

// Identity gives perfect scores, a 1 m shift sits between the two
// tolerances, and heights scaled by e give a log error of exactly 1.
Outcome metric_fixtures() {
  const VectorMap& map = seed1_city();
  const double res = 0.5;
  const geom::GeoGrid grid{{map.origin.x + 250.0, map.origin.y + 250.0}, res, 600, 600};
  synth::RenderOptions ro;
  ro.texture = false;
  const auto tile = synth::render_aerial(map, grid, ro);
  std::vector<std::string> bad;
  int checks = 0;
  auto check = [&](const std::string& name, std::optional<double> v, double want) {
    ++checks;
    if (!v || *v != want) bad.push_back(name + "=" + (v ? fmt("%.6g", *v) : std::string("n/a")));
  };
  check("mIoU", metrics::semantic_miou(tile.semantic, tile.semantic).mean_iou, 1.0);
  const auto inst = metrics::instances_from_labels(tile.instance);
  const auto ir = metrics::instance_metrics(inst, inst);
  check("WCov", ir.wcov, 1.0);
  check("AP", ir.ap, 1.0);
  check("P@50", ir.precision50, 1.0);
  check("R@50", ir.recall50, 1.0);
  std::vector<geom::Polygon> polys;
  std::vector<double> heights;
  for (const auto& b : map.buildings)
    if (grid.contains(b.footprint.ring().front())) polys.push_back(b.footprint), heights.push_back(b.height);
  const auto cr = metrics::contour_metrics(polys, polys, grid);
  check("contour WCov", cr.wcov, 1.0);
  check("PolySim", cr.polysim, 1.0);
  const auto lines = map.centerline_polylines();
  for (double tau : {0.5, 2.0}) {
    const auto tr = metrics::topology_pr(lines, lines, tau);
    check(fmt("Pr@%.1f", tau), tr.precision, 1.0);
    check(fmt("Re@%.1f", tau), tr.recall, 1.0);
    check(fmt("F1@%.1f", tau), tr.f1, 1.0);
  }
  std::vector<int> zones;
  for (const auto& b : map.blocks) zones.push_back(static_cast<int>(b.zone));
  check("Top1", metrics::top1_accuracy(zones, zones), 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < heights.size(); ++k) pairs.emplace_back(k, k);
  check("logRMSE identity", metrics::height_log_rmse(heights, heights, pairs).log_rmse, 0.0);

  // Every vertex moved 1 m across its line.
  const std::vector<geom::Polyline> gt{geom::Polyline({{0, 0}, {50, 0}, {50, 40}}),
                                       geom::Polyline({{-20, 60}, {30, 60}})};
  const std::vector<geom::Polyline> shifted{geom::Polyline({{0, 1}, {49, 1}, {49, 40}}),
                                            geom::Polyline({{-20, 61}, {30, 61}})};
  check("shift F1@0.5", metrics::topology_pr(shifted, gt, 0.5).f1, 0.0);
  check("shift F1@2.0", metrics::topology_pr(shifted, gt, 2.0).f1, 1.0);

  std::vector<double> scaled;
  for (double v : heights) scaled.push_back(std::numbers::e * v);
  const auto hr = metrics::height_log_rmse(scaled, heights, pairs);
  const bool e_ok = hr.log_rmse && std::abs(*hr.log_rmse - 1.0) <= 1e-12;
  if (!e_ok) bad.push_back(fmt("e-scaled logRMSE=%.17g", hr.log_rmse.value_or(-1.0)));
  return {bad.empty(), bad.empty() ? fmt("%d fixture scores exact on %zu buildings and %zu centerlines; e-scaled "
                                         "logRMSE %.15f",
                                         checks, polys.size(), lines.size(), *hr.log_rmse)
                                   : "wrong: " + [&] {
                                       std::string s;
                                       for (const auto& b : bad) s += b + " ";
                                       return s;
                                     }()};
}

// Opening splits the bridged pair; medial axis of the seed-1 road raster
// against the generator centerlines.
Outcome baseline_pipeline() {
  Mask m(80, 40);
  for (int y = 5; y < 35; ++y) {
    for (int x = 5; x < 35; ++x) m(x, y) = 1;
    for (int x = 45; x < 75; ++x) m(x, y) = 1;
  }
  for (int x = 35; x < 45; ++x) m(x, 20) = 1;
  const geom::GeoGrid bgrid{{0, 0}, 0.1, 80, 40};
  cli::BuildingExtractOptions bo;
  bo.min_area = 0.0;
  const auto bi = cli::extract_buildings(m, bgrid, bo);
  const int before = extract::connected_components(m).count;
  const int instances = static_cast<int>(bi.outlines.size());

  const VectorMap& map = seed1_city();
  const double res = 0.5;
  const int w = static_cast<int>(std::lround(map.extent_x / res)), h = static_cast<int>(std::lround(map.extent_y / res));
  const geom::GeoGrid grid{map.origin, res, w, h};
  synth::RenderOptions ro;
  ro.texture = false;
  const auto tile = synth::render_aerial(map, grid, ro);
  Mask road(w, h, 0);
  for (std::size_t i = 0; i < road.size(); ++i) road[i] = tile.semantic[i] == synth::kRoad;
  const auto f1 = metrics::topology_pr(extract::medial_axis(road, grid), map.centerline_polylines(), 2.0).f1;
  return {before == 1 && instances == 2 && f1 >= 0.9,
          fmt("bridged fixture: %d component before, %d instances after opening; medial-axis F1@2.0 %.4f at %.1f m "
              "(need 0.9)",
              before, instances, f1, res)};
}

std::map<std::string, std::string> file_tree(const fs::path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      m[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
  return m;
}

// Every command of the seed-1 pipeline at the default 0.1 m, run twice into
// separate directories; all outputs must match byte for byte.
Outcome determinism() {
  const auto t0 = Clock::now();
  const fs::path base = fs::temp_directory_path() / ("urbanbench_acceptance_" + std::to_string(::getpid()));
  std::string failure;
  auto pipeline = [&](const fs::path& d) {
    fs::remove_all(d);
    const std::string m = (d / "map.geojson").string(), tiles = (d / "tiles").string(), fx = (d / "fx").string(),
                      ext = (d / "ext").string(), roads = (d / "roads").string(), poses = (d / "poses.jsonl").string();
    const std::vector<std::vector<std::string>> steps{
        {"gen-city", "--seed", "1", "--out", d.string()},
        {"render", m, "--out", tiles},
        {"gen-roads", m, "--out", roads},
        {"make-fixtures", m, "--out", fx, "--count", "4"},
        {"align", "--panoramas", fx, "--aerial", tiles, "--map", m, "--workers", "2", "--out", poses},
        {"extract", "roads", tiles, "--out", ext},
        {"extract", "buildings", tiles, "--out", ext},
        {"eval-semantic", tiles, tiles, "--json", (d / "semantic.json").string()},
        {"eval-instance", tiles, ext, "--json", (d / "instance.json").string()},
        {"eval-contour", m, ext + "/buildings.geojson", "--json", (d / "contour.json").string()},
        {"eval-height", m, ext + "/buildings.geojson", "--json", (d / "height.json").string()},
        {"eval-road-topology", ext + "/centerlines.geojson", roads + "/centerlines.geojson", "--json",
         (d / "topology.json").string()},
        {"eval-zoning", m, m, "--json", (d / "zoning.json").string()},
        {"verify-prep", "--poses", poses, "--panoramas", fx, "--map", m, "--out", (d / "verify").string()},
    };
    for (const auto& s : steps) {
      std::ostringstream out, err;
      if (const int rc = cli::run_cli(s, out, err); rc != 0 && failure.empty())
        failure = s.front() + " exited " + std::to_string(rc) + ": " + err.str();
    }
  };
  pipeline(base / "a");
  pipeline(base / "b");
  if (!failure.empty()) return {false, failure};
  const auto a = file_tree(base / "a"), b = file_tree(base / "b");
  std::size_t bytes = 0, differ = 0;
  std::string first;
  for (const auto& [k, v] : a) {
    bytes += v.size();
    const auto it = b.find(k);
    if (it == b.end() || it->second != v) {
      if (first.empty()) first = k;
      ++differ;
    }
  }
  fs::remove_all(base);
  const bool ok = differ == 0 && a.size() == b.size();
  return {ok, ok ? fmt("%zu files, %.1f MB identical across two runs (%.0f s)", a.size(), bytes / 1e6, seconds_since(t0))
                 : fmt("%zu of %zu files differ, first: %s", differ, a.size(), first.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dp-vs-brute-force", dp_vs_brute_force},   {"fft-ncc-equivalence", fft_ncc_equivalence},
      {"alignment-recovery", alignment_recovery}, {"road-surface-oracle", road_surface_oracle},
      {"metric-fixtures", metric_fixtures},       {"baseline-pipeline", baseline_pipeline},
      {"determinism", determinism},
  };
  const std::set<std::string> only(argv + 1, argv + argc);
  for (const auto& o : only)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == o; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", o.c_str());
      return 2;
    }
  int failed = 0, run = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    ++run;
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %-20s %s\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
