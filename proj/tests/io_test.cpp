#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>

#include "urbanbench/io/config.hpp"
#include "urbanbench/io/geojson.hpp"
#include "urbanbench/io/png.hpp"
#include "urbanbench/io/report.hpp"
#include "urbanbench/synth/city.hpp"

namespace fs = std::filesystem;
using namespace urbanbench;
using io::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("urbanbench_io_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

bool same_points(const std::vector<geom::Point2>& a, const std::vector<geom::Point2>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].x != b[i].x || a[i].y != b[i].y) return false;
  return true;
}

}  // namespace

TEST(GeoJson, CityRoundTripsExactly) {
  synth::CityParams p;
  p.seed = 3;
  const VectorMap a = synth::generate_city(p);
  const fs::path dir = scratch("roundtrip");
  io::save_vector_map(dir / "map.geojson", a);
  const VectorMap b = io::load_vector_map(dir);  // directory resolves to map.geojson
  EXPECT_EQ(b.origin.x, a.origin.x);
  EXPECT_EQ(b.extent_x, a.extent_x);
  EXPECT_EQ(b.extent_y, a.extent_y);
  ASSERT_EQ(b.centerlines.size(), a.centerlines.size());
  for (std::size_t i = 0; i < a.centerlines.size(); ++i) {
    EXPECT_EQ(b.centerlines[i].id, a.centerlines[i].id);
    EXPECT_EQ(b.centerlines[i].start_node, a.centerlines[i].start_node);
    EXPECT_EQ(b.centerlines[i].end_node, a.centerlines[i].end_node);
    EXPECT_EQ(b.centerlines[i].width, a.centerlines[i].width);
    EXPECT_TRUE(same_points(b.centerlines[i].line.vertices(), a.centerlines[i].line.vertices()));
  }
  ASSERT_EQ(b.curbs.size(), a.curbs.size());
  for (std::size_t i = 0; i < a.curbs.size(); ++i)
    EXPECT_TRUE(same_points(b.curbs[i].vertices(), a.curbs[i].vertices()));
  ASSERT_EQ(b.buildings.size(), a.buildings.size());
  for (std::size_t i = 0; i < a.buildings.size(); ++i) {
    EXPECT_EQ(b.buildings[i].height, a.buildings[i].height);
    EXPECT_TRUE(same_points(b.buildings[i].footprint.ring(), a.buildings[i].footprint.ring()));
  }
  ASSERT_EQ(b.blocks.size(), a.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) EXPECT_EQ(b.blocks[i].zone, a.blocks[i].zone);
  ASSERT_TRUE(a.road_outer && b.road_outer);
  EXPECT_TRUE(same_points(b.road_outer->ring(), a.road_outer->ring()));
  // Serialization is a pure function of the map.
  EXPECT_EQ(io::to_geojson(b).dump(), io::to_geojson(a).dump());
}

TEST(GeoJson, OuterRingWithoutMatchingCurbTravelsSeparately) {
  VectorMap m;
  m.extent_x = m.extent_y = 10;
  m.curbs.push_back(geom::Polyline({{1, 1}, {2, 2}}));
  m.road_outer = geom::Polygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  const VectorMap b = io::from_geojson(io::to_geojson(m));
  EXPECT_EQ(b.curbs.size(), 1u);
  ASSERT_TRUE(b.road_outer);
  EXPECT_TRUE(same_points(b.road_outer->ring(), m.road_outer->ring()));
}

TEST(GeoJson, SchemaViolationsAreReported) {
  const json line = {{"type", "LineString"}, {"coordinates", {{0, 0}, {1, 0}}}};
  const json square = {{"type", "Polygon"}, {"coordinates", {{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}}}};
  auto doc = [](json f) { return json{{"type", "FeatureCollection"}, {"features", json::array({f})}}; };
  auto feat = [](json g, json props) { return json{{"type", "Feature"}, {"geometry", g}, {"properties", props}}; };

  const std::vector<json> bad = {
      json{{"type", "Feature"}},
      doc(feat(line, {{"layer", "river"}})),
      doc(feat(line, json::object())),
      doc(feat(square, {{"layer", "building"}, {"id", 1}})),                    // no height
      doc(feat(square, {{"layer", "building"}, {"id", 1}, {"height_m", -2}})),  // negative height
      doc(feat(line, {{"layer", "building"}, {"id", 1}, {"height_m", 3}})),     // wrong geometry
      doc(feat(square, {{"layer", "zoning"}, {"id", 1}, {"category", "farm"}})),
      doc(feat({{"type", "LineString"}, {"coordinates", {{0, 0}}}}, {{"layer", "curb"}})),
      doc(feat({{"type", "LineString"}, {"coordinates", {{0, "a"}, {1, 1}}}}, {{"layer", "curb"}})),
      doc(feat({{"type", "Polygon"}, {"coordinates", {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}}},
               {{"layer", "building"}, {"id", 1}, {"height_m", 3}})),  // ring not closed
  };
  for (const auto& d : bad) EXPECT_EQ(code_of([&] { io::from_geojson(d); }), ErrorCode::kSchema) << d.dump();

  const fs::path dir = scratch("schema");
  io::write_text(dir / "broken.geojson", "{not json");
  EXPECT_EQ(code_of([&] { io::load_vector_map(dir / "broken.geojson"); }), ErrorCode::kSchema);
  EXPECT_EQ(code_of([&] { io::load_vector_map(dir / "absent"); }), ErrorCode::kMissingFile);
}

TEST(GeoJson, ExtentFallsBackToDataBounds) {
  const json d = {{"type", "FeatureCollection"},
                  {"features",
                   {{{"type", "Feature"},
                     {"geometry", {{"type", "LineString"}, {"coordinates", {{2, 3}, {7, 11}}}}},
                     {"properties", {{"layer", "curb"}}}}}}};
  const VectorMap m = io::from_geojson(d);
  EXPECT_EQ(m.origin.x, 2);
  EXPECT_EQ(m.origin.y, 3);
  EXPECT_EQ(m.extent_x, 5);
  EXPECT_EQ(m.extent_y, 8);
}

TEST(Png, EightAndSixteenBitRoundTrip) {
  const fs::path dir = scratch("png");
  std::mt19937 rng(4);
  for (int depth : {8, 16}) {
    io::PngData d{37, 19, depth, {}};
    std::uniform_int_distribution<int> v(0, depth == 8 ? 255 : 65535);
    for (int i = 0; i < 37 * 19; ++i) d.samples.push_back(static_cast<std::uint16_t>(v(rng)));
    const fs::path p = dir / ("raw" + std::to_string(depth) + ".png");
    io::write_png(p, d);
    const io::PngData back = io::read_png(p);
    EXPECT_EQ(back.width, 37);
    EXPECT_EQ(back.height, 19);
    EXPECT_EQ(back.bit_depth, depth);
    EXPECT_EQ(back.samples, d.samples);
  }
}

TEST(Png, SidecarCarriesGridAndValueMapping) {
  const fs::path dir = scratch("sidecar");
  const geom::GeoGrid grid{{500.0, 1000.0}, 0.25, 12, 8};
  Image h(12, 8);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 0.01 * static_cast<double>(i * 37 % 4000);
  io::save_raster(dir / "height.png", h, {grid, 16, 0.01, 0.0, "height"});
  const auto back = io::load_raster<double>(dir / "height.png");
  EXPECT_EQ(back.meta.grid, grid);
  EXPECT_EQ(back.meta.kind, "height");
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(back.raster[i], h[i], 1e-9);

  Mask m(12, 8);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint8_t>(i % 3);
  io::save_raster(dir / "labels.png", m, {grid, 8, 1.0, 0.0, "semantic"});
  const auto lm = io::load_raster<std::uint8_t>(dir / "labels.png");
  EXPECT_EQ(lm.raster.data(), m.data());
  EXPECT_EQ(lm.meta.bit_depth, 8);

  // Out-of-range values are refused rather than wrapped.
  Image big(2, 2, 300.0);
  EXPECT_EQ(code_of([&] { io::save_raster(dir / "big.png", big, {{{0, 0}, 1, 2, 2}, 8, 1.0, 0.0, ""}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Png, IntensityKeepsSixteenBitPrecision) {
  const fs::path dir = scratch("intensity");
  const geom::GeoGrid grid{{0, 0}, 0.1, 20, 10};
  ImageF img(20, 10);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(i) / 199.0f;
  io::save_intensity(dir / "a.png", img, grid, "aerial");
  const auto back = io::load_raster<float>(dir / "a.png");
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back.raster[i], img[i], 0.5 / 65535.0 + 1e-7);
}

TEST(Png, BadInputsAreReported) {
  const fs::path dir = scratch("badpng");
  io::write_text(dir / "fake.png", "definitely not a png");
  EXPECT_EQ(code_of([&] { io::read_png(dir / "fake.png"); }), ErrorCode::kSchema);
  EXPECT_EQ(code_of([&] { io::read_png(dir / "none.png"); }), ErrorCode::kMissingFile);
  io::write_png(dir / "ok.png", {4, 4, 8, std::vector<std::uint16_t>(16, 1)});
  io::write_text(dir / "ok.json", R"({"origin": [0, 0], "resolution": 1, "width": 5, "height": 4, "bit_depth": 8})");
  EXPECT_EQ(code_of([&] { io::load_raster<int>(dir / "ok.png"); }), ErrorCode::kSchema);
  fs::remove(dir / "ok.json");
  const auto plain = io::load_raster<int>(dir / "ok.png");
  EXPECT_EQ(plain.meta.grid.resolution, 1.0);
}

TEST(Config, SectionsFlattenAndOverridesWin) {
  const fs::path dir = scratch("config");
  io::write_text(dir / "a.ini", "seed = 9\n[align]\nlambda = 0.5\nstep = 0.2\n[render]\ntexture = false\n");
  io::Config c = io::Config::from_file(dir / "a.ini");
  c.set("align.step", "0.1");
  int seed = 0;
  double lambda = 0, step = 0;
  bool texture = true;
  std::string absent = "kept";
  c.bind("seed", seed);
  c.bind("align.lambda", lambda);
  c.bind("align.step", step);
  c.bind("render.texture", texture);
  c.bind("render.name", absent);
  EXPECT_EQ(seed, 9);
  EXPECT_EQ(lambda, 0.5);
  EXPECT_EQ(step, 0.1);
  EXPECT_FALSE(texture);
  EXPECT_EQ(absent, "kept");
  EXPECT_TRUE(c.unknown_keys().empty());
  c.reject_unknown();
}

TEST(Config, UnknownAndMalformedKeysAreConfigErrors) {
  io::Config c;
  c.set("align.lamda", "0.5");
  c.set("align.step", "fast");
  double step = 0;
  EXPECT_EQ(code_of([&] { c.bind("align.step", step); }), ErrorCode::kConfig);
  EXPECT_EQ(c.unknown_keys(), std::vector<std::string>{"align.lamda"});
  EXPECT_EQ(code_of([&] { c.reject_unknown(); }), ErrorCode::kConfig);
  int n = 0;
  io::Config d;
  d.set("n", "3.5");
  EXPECT_EQ(code_of([&] { d.bind("n", n); }), ErrorCode::kConfig);
}

TEST(Config, EnvironmentVariableNamesTheDefaultFile) {
  const fs::path dir = scratch("env");
  io::write_text(dir / "env.ini", "seed = 42\n");
  ::setenv("URBANBENCH_CONFIG", (dir / "env.ini").c_str(), 1);
  io::Config c = io::Config::load(std::nullopt);
  int seed = 0;
  c.bind("seed", seed);
  EXPECT_EQ(seed, 42);
  ::setenv("URBANBENCH_CONFIG", (dir / "missing.ini").c_str(), 1);
  EXPECT_EQ(code_of([] { io::Config::load(std::nullopt); }), ErrorCode::kMissingFile);
  ::unsetenv("URBANBENCH_CONFIG");
  EXPECT_TRUE(io::Config::load(std::nullopt).values().empty());
  io::write_text(dir / "broken.ini", "[align\nlambda = 1\n");
  EXPECT_EQ(code_of([&] { io::Config::from_file(dir / "broken.ini"); }), ErrorCode::kConfig);
}

TEST(MetricReport, TableAndJsonAgree) {
  io::MetricReport r;
  r.task = "road-topology";
  r.add("F1@0.5", 1.0);
  r.add("Pr@0.5", 0.25);
  r.add("Re@0.5", std::nullopt);
  const std::string t = r.table();
  EXPECT_NE(t.find("F1@0.5"), std::string::npos);
  EXPECT_NE(t.find("1.0000"), std::string::npos);
  EXPECT_NE(t.find("0.2500"), std::string::npos);
  EXPECT_NE(t.find("n/a"), std::string::npos);
  const json j = r.to_json();
  EXPECT_EQ(j["metrics"]["Pr@0.5"], 0.25);
  EXPECT_TRUE(j["metrics"]["Re@0.5"].is_null());
}
