#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "urbanbench/cli/cmd_align.hpp"
#include "urbanbench/cli/cmd_eval.hpp"
#include "urbanbench/cli/cmd_extract.hpp"
#include "urbanbench/cli/cmd_synth.hpp"
#include "urbanbench/cli/cmd_verify.hpp"

namespace urbanbench::cli {

namespace detail {

// Leftover "--key value" or "--key=value" arguments become config overrides.
inline void apply_overrides(io::Config& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3)
      fail(ErrorCode::kInvalidArgument, "unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      cfg.set(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) fail(ErrorCode::kConfig, "override --" + body + " needs a value");
      cfg.set(body, extras[++i]);
    }
  }
}

}  // namespace detail

// Parses the command line, runs one command and returns the process exit
// status: 0 on success, the ErrorCode value for a known failure, 1 otherwise.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Synthetic urban mapping benchmark: city generation, alignment, road surfaces, extraction and metrics"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "urbanbench 1.0");

  std::string config_path;
  std::function<int(const io::Config&)> action;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config", config_path, "INI config file (default: $URBANBENCH_CONFIG)");
    sub->footer("Any other --section.key value pair overrides the config file.");
    return sub;
  };

  GenCityArgs gc;
  std::uint64_t gc_seed = 0;
  auto* s_gc = add("gen-city", "Generate a synthetic city vector map");
  s_gc->add_option("--seed", gc_seed, "city seed (overrides city.seed)");
  s_gc->add_option("--out", gc.out, "output directory")->required();
  s_gc->callback([&] {
    if (s_gc->count("--seed")) gc.seed = gc_seed;
    action = [&](const io::Config& c) { return cmd_gen_city(gc, c, out); };
  });

  RenderArgs rd;
  double rd_res = 0;
  auto* s_rd = add("render", "Render aerial and ground-truth raster tiles from a vector map");
  s_rd->add_option("map", rd.map, "vector map (file or directory holding map.geojson)")->required();
  s_rd->add_option("--out", rd.out, "output directory")->required();
  s_rd->add_option("--res", rd_res, "meters per pixel (overrides raster.resolution)");
  s_rd->callback([&] {
    if (s_rd->count("--res")) rd.res = rd_res;
    action = [&](const io::Config& c) { return cmd_render(rd, c, out); };
  });

  GenRoadsArgs gr;
  double gr_res = 0;
  std::string gr_json;
  auto* s_gr = add("gen-roads", "Road surface from curbs and centerlines, with reference centerlines");
  s_gr->add_option("map", gr.map, "vector map")->required();
  s_gr->add_option("--out", gr.out, "output directory")->required();
  s_gr->add_option("--res", gr_res, "meters per pixel (overrides raster.resolution)");
  s_gr->add_option("--json", gr_json, "report file (default: <out>/report.json)");
  s_gr->callback([&] {
    if (s_gr->count("--res")) gr.res = gr_res;
    if (!gr_json.empty()) gr.json_out = gr_json;
    action = [&](const io::Config& c) { return cmd_gen_roads(gr, c, out); };
  });

  MakeFixturesArgs mf;
  std::uint64_t mf_seed = 0;
  auto* s_mf = add("make-fixtures", "Panoramas with planted pose offsets and their aerial crops");
  s_mf->add_option("map", mf.map, "vector map")->required();
  s_mf->add_option("--out", mf.out, "output directory")->required();
  s_mf->add_option("--count", mf.count, "number of fixtures")->check(CLI::NonNegativeNumber);
  s_mf->add_option("--seed", mf_seed, "fixture seed (overrides fixture.seed)");
  s_mf->callback([&] {
    if (s_mf->count("--seed")) mf.seed = mf_seed;
    action = [&](const io::Config& c) { return cmd_make_fixtures(mf, c, out); };
  });

  AlignArgs al;
  std::string al_aerial, al_map, al_edges;
  auto* s_al = add("align", "Align panoramas to aerial imagery (and curbs when a map is given)");
  s_al->add_option("--panoramas", al.panoramas, "directory searched for panorama.png")->required();
  s_al->add_option("--aerial", al_aerial, "directory searched for aerial.png tiles (default: next to each panorama)");
  s_al->add_option("--map", al_map, "vector map whose curbs drive the fine step");
  s_al->add_option("--edges", al_edges, "directory of <id>.png edge rasters used as given");
  s_al->add_option("--workers", al.workers, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  s_al->add_option("--out", al.out, "output JSON-lines file")->required();
  s_al->callback([&] {
    if (!al_aerial.empty()) al.aerial = al_aerial;
    if (!al_map.empty()) al.map = al_map;
    if (!al_edges.empty()) al.edges = al_edges;
    action = [&](const io::Config& c) { return cmd_align(al, c, out); };
  });

  ExtractArgs ex;
  int ex_label = 0;
  auto* s_ex = add("extract", "Baseline extraction from semantic rasters");
  s_ex->add_option("kind", ex.kind, "roads | buildings")->required()->check(CLI::IsMember({"roads", "buildings"}));
  s_ex->add_option("input", ex.input, "semantic raster or directory of tiles")->required();
  s_ex->add_option("--out", ex.out, "output directory")->required();
  s_ex->add_option("--name", ex.name, "raster file name inside tile directories");
  s_ex->add_option("--label", ex_label, "class value to extract (roads 1, buildings 2)");
  s_ex->callback([&] {
    if (s_ex->count("--label")) ex.label = ex_label;
    action = [&](const io::Config& c) { return cmd_extract(ex, c, out); };
  });

  EvalArgs ev;
  std::string ev_json;
  double ev_res = 0;
  bool ev_no_dc = false;
  auto eval = [&](const std::string& name, const std::string& help, const std::string& default_file,
                  int (*fn)(const EvalArgs&, const io::Config&, std::ostream&)) {
    auto* s = add(name, help);
    s->add_option("gt", ev.gt, "ground truth")->required();
    s->add_option("pred", ev.pred, "prediction")->required();
    s->add_option("--json", ev_json, "also write the report as JSON");
    if (!default_file.empty()) {
      s->add_option("--name", ev.name, "raster file name inside tile directories");
      s->add_flag("--no-dontcare", ev_no_dc, "ignore dontcare.png next to the ground truth");
    }
    s->callback([&, s, default_file, fn] {
      auto given = [s](const char* opt) {
        const CLI::Option* o = s->get_option_no_throw(opt);
        return o != nullptr && o->count() > 0;
      };
      if (!given("--name")) ev.name = default_file;
      if (!ev_json.empty()) ev.json_out = ev_json;
      if (given("--res")) ev.res = ev_res;
      ev.use_dontcare = !ev_no_dc;
      action = [&, fn](const io::Config& c) { return fn(ev, c, out); };
    });
    return s;
  };
  eval("eval-semantic", "Per-class IoU and mIoU of label rasters", "semantic.png", cmd_eval_semantic)
      ->add_option("--classes", ev.classes, "labels to score, e.g. 1,2")
      ->delimiter(',');
  eval("eval-instance", "Weighted coverage, AP, precision and recall of instance rasters", "instance.png",
       cmd_eval_instance);
  eval("eval-contour", "Weighted coverage and polygon similarity of building outlines", "", cmd_eval_contour)
      ->add_option("--res", ev_res, "rasterization resolution in meters");
  eval("eval-height", "Log-domain RMSE of matched building heights", "", cmd_eval_height)
      ->add_option("--res", ev_res, "rasterization resolution in meters");
  auto* s_topo = eval("eval-road-topology", "Polyline precision, recall and F1 at distance tolerances", "",
                      cmd_eval_road_topology);
  s_topo->add_option("--tau", ev.taus, "tolerance in meters; repeatable (default 0.5 and 2.0)");
  s_topo->add_option("--layer", ev.layer, "centerline | curb")->check(CLI::IsMember({"centerline", "curb"}));
  eval("eval-zoning", "Top-1 accuracy of block zoning categories", "", cmd_eval_zoning);

  VerifyPrepArgs vp;
  std::string vp_aerial;
  auto* s_vp = add("verify-prep", "Render before/after overlays and the review item list");
  s_vp->add_option("--poses", vp.poses, "poses.jsonl from align")->required();
  s_vp->add_option("--panoramas", vp.panoramas, "directory the pose lines refer to")->required();
  s_vp->add_option("--map", vp.map, "vector map")->required();
  s_vp->add_option("--aerial", vp_aerial, "aerial tile directory (default: next to each panorama)");
  s_vp->add_option("--out", vp.out, "output directory")->required();
  s_vp->callback([&] {
    if (!vp_aerial.empty()) vp.aerial = vp_aerial;
    action = [&](const io::Config& c) { return cmd_verify_prep(vp, c, out); };
  });

  ServeArgs sv;
  std::string sv_journal;
  auto* s_sv = add("serve-verify", "Serve the review API over HTTP");
  s_sv->add_option("items", sv.items, "items.jsonl from verify-prep")->required();
  s_sv->add_option("--journal", sv_journal, "decision journal (default: decisions.jsonl next to the items)");
  s_sv->add_option("--host", sv.host, "listen address");
  s_sv->add_option("--port", sv.port, "listen port; 0 picks a free one")->check(CLI::Range(0, 65535));
  s_sv->callback([&] {
    if (!sv_journal.empty()) sv.journal = sv_journal;
    action = [&](const io::Config& c) { return cmd_serve_verify(sv, c, out); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::kInvalidArgument);
  }
  try {
    io::Config cfg = io::Config::load(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path));
    for (const auto* sub : app.get_subcommands()) detail::apply_overrides(cfg, sub->remaining());
    check_config_keys(cfg);
    return action(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"urbanbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace urbanbench::cli
