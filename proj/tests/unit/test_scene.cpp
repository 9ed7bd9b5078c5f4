// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "streamstyle/scene.hpp"

namespace ss = streamstyle;
namespace sc = ss::scene;
using nlohmann::json;

namespace {

json minimal_scene() {
  return json::parse(R"({
    "styleset_version": 1,
    "dataset": {"analytic": {"kind": "abc", "dims": [8, 8, 8]}},
    "seeds": {"strategy": "random", "count": 10, "rng_seed": 1},
    "trace": {"step": 0.05, "max_steps": 50},
    "styles": [
      {"id": "A", "bands": [{"color": {"constant": [1, 1, 1]}, "width": {"max": 0.8}},
                            {"color": {"constant": [0, 0, 0]}, "width": {"max": 0.2},
                             "depth_offset": 0.1, "halo": true}]},
      {"id": "B", "bands": [{"color": {"colormap": "grayscale", "attribute": "temperature"},
                             "width": {"min": 0.1, "max": 0.5, "attribute": "speed"}}]}
    ],
    "style": "A",
    "camera": {"eye": [3, 3, 12], "look_at": [3, 3, 3]},
    "image": {"width": 64, "height": 48},
    "global_scale": 0.05,
    "output": "x.png"
  })");
}

std::vector<std::string> pointers(const std::vector<sc::Finding>& f) {
  std::vector<std::string> out;
  for (const auto& x : f) out.push_back(x.pointer);
  return out;
}

bool has_pointer(const std::vector<sc::Finding>& f, const std::string& p) {
  const auto v = pointers(f);
  return std::find(v.begin(), v.end(), p) != v.end();
}

std::filesystem::path write_temp(const std::string& name, const json& doc) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << doc.dump(2);
  return path;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const std::string cmd = std::string(STREAMSTYLE_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string text;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  const int status = pclose(pipe);
  if (out) *out = text;
  return WEXITSTATUS(status);
}

}  // namespace

TEST(SceneParse, ValidSceneHasNoFindings) {
  const auto res = sc::parse_scene(minimal_scene(), ".");
  EXPECT_TRUE(res.findings.empty()) << (res.findings.empty() ? "" : res.findings[0].message);
  ASSERT_TRUE(res.config);
  EXPECT_EQ(res.config->styles.styles().size(), 2u);
  EXPECT_EQ(res.config->image.width, 64);
  EXPECT_EQ(res.config->image.background, (ss::raster::Rgba8{255, 255, 255, 255}));
  EXPECT_EQ(res.config->trace.direction, ss::tracer::Direction::both);
}

TEST(SceneParse, UnknownStyleInTransferFunction) {
  auto doc = minimal_scene();
  doc.erase("style");
  doc["transfer_function"] = {{"attribute", "s"},
                              {"entries", {{{"range", {0.0, 0.5}}, {"style", "X"}}}},
                              {"default", "A"}};
  const auto res = sc::parse_scene(doc, ".");
  EXPECT_FALSE(res.config);
  EXPECT_TRUE(has_pointer(res.findings, "/transfer_function/entries/0"));
}

TEST(SceneParse, OverlappingRanges) {
  auto doc = minimal_scene();
  doc["transfer_function"] = {{"attribute", "s"},
                              {"entries",
                               {{{"range", {0.0, 0.6}}, {"style", "A"}},
                                {{"range", {0.5, 1.0}}, {"style", "B"}}}},
                              {"default", "A"}};
  const auto res = sc::parse_scene(doc, ".");
  ASSERT_EQ(res.findings.size(), 1u);
  EXPECT_NE(res.findings[0].message.find("overlap"), std::string::npos);
}

TEST(SceneParse, SchemaFindingsCarryPointers) {
  auto doc = minimal_scene();
  doc["styles"][1]["bands"][0]["color"]["colormap"] = "nope";
  doc["styles"][0]["bands"][0]["colour"] = 1;
  doc["camera"]["fov_y"] = "wide";
  doc["trace"]["step"] = -1;
  doc.erase("image");
  const auto res = sc::parse_scene(doc, ".");
  EXPECT_FALSE(res.config);
  for (const char* p : {"/styles/1/bands/0/color/colormap", "/styles/0/bands/0/colour",
                        "/camera/fov_y", "/trace/step", "/image"})
    EXPECT_TRUE(has_pointer(res.findings, p)) << p;

  // Invariant checks run on styles that parsed cleanly.
  doc = minimal_scene();
  doc["styles"][0]["bands"][1]["width"]["max"] = 1.5;
  EXPECT_TRUE(has_pointer(sc::parse_scene(doc, ".").findings, "/styles/0/bands/1/width/max"));
}

TEST(SceneParse, PatternExponentMustBePositive) {
  auto doc = minimal_scene();
  doc["styles"][0]["bands"][0]["color"] = {
      {"pattern",
       {{"length", 0.5}, {"exponent", 0.0}, {"color_a", {{"constant", {1, 1, 1}}}},
        {"color_b", {{"constant", {0, 0, 0}}}}}}};
  const auto res = sc::parse_scene(doc, ".");
  ASSERT_TRUE(has_pointer(res.findings, "/styles/0/bands/0/color/pattern/exponent"));
}

TEST(SceneParse, NestedPatternRejected) {
  auto doc = minimal_scene();
  const json inner = {{"length", 0.5}, {"color_a", {{"constant", {1, 1, 1}}}},
                      {"color_b", {{"constant", {0, 0, 0}}}}};
  json outer = inner;
  outer["color_a"] = {{"pattern", inner}};
  doc["styles"][0]["bands"][0]["color"] = {{"pattern", outer}};
  const auto res = sc::parse_scene(doc, ".");
  EXPECT_TRUE(has_pointer(res.findings, "/styles/0/bands/0/color/pattern/color_a/pattern"));
}

TEST(SceneParse, UnknownAttributeAndVersion) {
  auto doc = minimal_scene();
  doc["styleset_version"] = 2;
  doc["styles"][1]["bands"][0]["width"]["attribute"] = "vorticity";
  const auto res = sc::parse_scene(doc, ".");
  EXPECT_TRUE(has_pointer(res.findings, "/styleset_version"));
  EXPECT_TRUE(has_pointer(res.findings, "/styles/1/bands/0/width/attribute"));
}

TEST(SceneParse, SfgDatasetChannelsComeFromHeader) {
  const auto dir = std::filesystem::temp_directory_path() / "ss_scene_sfg";
  std::filesystem::create_directories(dir);
  std::vector<float> vel(24, 0.5f);
  ss::field::save_grid(ss::field::VectorFieldGrid({2, 2, 2}, {0, 0, 0}, {1, 1, 1}, vel,
                                                  {{"density", std::vector<float>(8, 1.0f)}}),
                       dir / "f.sfg");
  auto doc = minimal_scene();
  doc["dataset"] = {{"path", "f.sfg"}};
  auto res = sc::parse_scene(doc, dir);
  EXPECT_TRUE(has_pointer(res.findings, "/styles/1/bands/0/color/attribute"));
  doc["styles"][1]["bands"][0]["color"]["attribute"] = "density";
  res = sc::parse_scene(doc, dir);
  EXPECT_TRUE(res.findings.empty());
  ASSERT_TRUE(res.config);
  EXPECT_EQ(*res.config->dataset.path, dir / "f.sfg");
  doc["dataset"] = {{"path", "missing.sfg"}};
  EXPECT_TRUE(has_pointer(sc::parse_scene(doc, dir).findings, "/dataset/path"));
}

TEST(StyleJson, RoundTrip) {
  auto doc = minimal_scene();
  doc["styles"][1]["bands"].push_back(json::parse(R"({
    "color": {"pattern": {"x_source": "integration_time", "length": 0.3, "slope": 0.2,
                          "exponent": 2.0, "color_width": 0.4, "phase": 0.1,
                          "color_a": {"colormap": "heat", "attribute": "speed"},
                          "color_b": {"constant": [0.2, 0.3, 0.4]}}},
    "width": {"min": 0.0, "max": 0.3,
              "shape": {"x_source": "arc_length", "length": 0.2,
                        "mapping": [[0, 0], [0.5, 1], [1, 0]]}}
  })"));
  doc.erase("style");
  doc["transfer_function"] = {{"attribute", "temperature"},
                              {"entries", {{{"range", {0.5, 1.0}}, {"style", "B"}}}},
                              {"default", "A"}};
  const auto res = sc::parse_scene(doc, ".");
  ASSERT_TRUE(res.config) << res.findings[0].pointer << " " << res.findings[0].message;
  const json once = sc::styleset_to_json(res.config->styles);
  const std::vector<std::string> channels{"speed", "temperature", "pressure"};
  const auto again = sc::parse_styleset(once, channels);
  ASSERT_TRUE(again.styles);
  EXPECT_EQ(sc::styleset_to_json(*again.styles), once);
}

TEST(Registries, ListBuiltins) {
  const json maps = sc::colormaps_json();
  std::vector<std::string> names;
  for (const auto& m : maps) names.push_back(m["name"]);
  for (const char* n : {"grayscale", "blue_purple", "yellow_green"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end());
  const json presets = sc::style_presets_json();
  EXPECT_EQ(presets["shapes"].size(), 5u);
}

TEST(Pipeline, RenderIsDeterministic) {
  auto res = sc::parse_scene(minimal_scene(), ".");
  ASSERT_TRUE(res.config);
  const auto out = std::filesystem::temp_directory_path() / "ss_pipeline.png";
  sc::RunOptions opts;
  opts.output = out;
  const auto a = sc::run_scene(*res.config, opts);
  opts.threads = 3;
  const auto b = sc::run_scene(*res.config, opts);
  EXPECT_EQ(a.png, b.png);
  EXPECT_GT(a.trace.lines, 0u);
  const auto img = ss::raster::load_png(out);
  EXPECT_EQ(img.width, 64);
  EXPECT_EQ(img.height, 48);
}

TEST(Cli, ValidateReportsFindings) {
  auto doc = minimal_scene();
  doc.erase("style");
  doc["transfer_function"] = {{"attribute", "s"},
                              {"entries", {{{"range", {0.0, 0.5}}, {"style", "X"}}}},
                              {"default", "A"}};
  const auto path = write_temp("ss_cli_bad.json", doc);
  std::string out;
  EXPECT_EQ(run_cli("validate " + path.string(), &out), 2);
  const auto report = json::parse(out);
  EXPECT_FALSE(report["valid"].get<bool>());
  EXPECT_EQ(report["findings"][0]["pointer"], "/transfer_function/entries/0");

  EXPECT_EQ(run_cli("validate " + write_temp("ss_cli_ok.json", minimal_scene()).string(), &out), 0);
  EXPECT_TRUE(json::parse(out)["findings"].empty());
}

TEST(Cli, UnknownColormapFailsAndNamesIt) {
  auto doc = minimal_scene();
  doc["styles"][1]["bands"][0]["color"]["colormap"] = "rainbow_deluxe";
  std::string out;
  const int code = run_cli("render " + write_temp("ss_cli_cmap.json", doc).string(), &out);
  EXPECT_NE(code, 0);
  EXPECT_NE(out.find("rainbow_deluxe"), std::string::npos);
}

TEST(Cli, RenderWritesPngAndStats) {
  const auto out_png = std::filesystem::temp_directory_path() / "ss_cli_out.png";
  std::filesystem::remove(out_png);
  std::string out;
  EXPECT_EQ(run_cli("render " + write_temp("ss_cli_r.json", minimal_scene()).string() +
                        " --threads 2 --output " + out_png.string(),
                    &out),
            0);
  EXPECT_TRUE(std::filesystem::exists(out_png));
  for (const char* key : {"lines=", "vertices=", "dropped=", "trace_ms=", "raster_ms="})
    EXPECT_NE(out.find(key), std::string::npos) << key;
}

TEST(Cli, GenFieldAndPipelineErrors) {
  const auto sfg = std::filesystem::temp_directory_path() / "ss_gen.sfg";
  EXPECT_EQ(run_cli("gen-field abc " + sfg.string() + " --dims 4,5,6"), 0);
  EXPECT_EQ(ss::field::load_grid(sfg).dims(), (ss::field::Dims{4, 5, 6}));
  EXPECT_EQ(run_cli("gen-field vortex_street " + sfg.string()), 2);

  auto doc = minimal_scene();
  doc["seeds"]["region"] = {{"min", {50, 50, 50}}, {"max", {60, 60, 60}}};
  std::string out;
  EXPECT_EQ(run_cli("render " + write_temp("ss_cli_region.json", doc).string(), &out), 3);
  EXPECT_NE(out.find("tracer"), std::string::npos);
}

TEST(SceneParse, WidthMinDefaultsToZero) {
  auto doc = minimal_scene();
  doc["styles"][0]["bands"][0]["width"] = {{"max", 0.8}, {"shape", {{"length", 0.5}, {"mapping", "dash"}}}};
  const auto res = sc::parse_scene(doc, ".");
  ASSERT_TRUE(res.config);
  EXPECT_EQ(res.config->styles.styles()[0].bands[0].w_min, 0.0);
}
