// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <httplib.h>

#include <sstream>
#include <thread>

#include "streamstyle/service.hpp"

namespace ss = streamstyle;
namespace sv = ss::service;
using nlohmann::json;

namespace {

const char* kSession = R"({
  "dataset": {"analytic": {"kind": "abc", "dims": [16, 16, 16]}},
  "seeds": {"strategy": "random", "count": 100, "rng_seed": 4},
  "trace": {"step": 0.05, "max_steps": 100}
})";

const char* kTwoBand = R"({
  "styles": [{"id": "bw", "bands": [
    {"color": {"constant": [1, 1, 1]}, "width": {"max": 0.75}},
    {"color": {"constant": [0, 0, 0]}, "width": {"max": 0.25}, "depth_offset": 0.1, "halo": true}]}],
  "global_scale": 0.05
})";

const char* kDashed = R"({
  "styles": [{"id": "d", "bands": [
    {"color": {"constant": [1, 1, 1]}, "width": {"max": 1.0,
      "shape": {"length": 0.8, "mapping": "dash"}}}]}],
  "global_scale": 0.2,
  "background": [0, 0, 0, 255]
})";

const char* kRender = R"({
  "camera": {"eye": [3.14, 3.14, 14], "look_at": [3.14, 3.14, 3.14]},
  "width": 64, "height": 64
})";

std::string new_session(sv::Service& s) {
  const auto r = s.create_session(kSession);
  EXPECT_EQ(r.status, 201) << r.body;
  return json::parse(r.body)["session_id"];
}

}  // namespace

TEST(Service, CreateSession) {
  sv::Service s;
  const auto r = s.create_session(kSession);
  ASSERT_EQ(r.status, 201);
  const auto body = json::parse(r.body);
  EXPECT_LE(body["stats"]["lines"].get<int>(), 100);
  EXPECT_GT(body["stats"]["vertices"].get<int>(), 0);
  EXPECT_NE(s.find(body["session_id"]), nullptr);
}

TEST(Service, MalformedBodies) {
  sv::Service s;
  EXPECT_EQ(s.create_session("{not json").status, 400);
  EXPECT_EQ(s.create_session("[1,2]").status, 400);
  EXPECT_EQ(s.create_session(R"({"dataset": {}})").status, 400);
  auto doc = json::parse(kSession);
  doc["trace"]["step"] = "fast";
  const auto r = s.create_session(doc.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json::parse(r.body)["findings"][0]["pointer"], "/trace/step");
}

TEST(Service, RegionOutsideGridIs422) {
  sv::Service s;
  auto doc = json::parse(kSession);
  doc["seeds"]["region"] = {{"min", {40, 40, 40}}, {"max", {41, 41, 41}}};
  const auto r = s.create_session(doc.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(json::parse(r.body)["drop_reasons"]["seed_outside"], 100);
}

TEST(Service, UploadedGrid) {
  const auto grid =
      ss::field::gen_analytic_field(ss::field::AnalyticKind::circular, {9, 9, 9}, {});
  std::ostringstream bytes;
  ss::field::write_sfg(grid, bytes);
  json doc = json::parse(kSession);
  doc["dataset"] = {{"sfg_base64", sv::base64_encode(bytes.str())}};
  sv::Service s;
  EXPECT_EQ(s.create_session(doc.dump()).status, 201);
  doc["dataset"] = {{"sfg_base64", "%%%"}};
  EXPECT_EQ(s.create_session(doc.dump()).status, 400);
  doc["dataset"] = {{"path", "/etc/passwd"}};
  EXPECT_EQ(s.create_session(doc.dump()).status, 400);
}

TEST(Service, Base64) {
  for (const std::string text : {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
    const auto enc = sv::base64_encode(text);
    EXPECT_EQ(sv::base64_decode(enc), text);
  }
  EXPECT_EQ(sv::base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(sv::base64_decode("Zm9v\nYg=="), "foob");
  EXPECT_FALSE(sv::base64_decode("Zm9"));
  EXPECT_FALSE(sv::base64_decode("Zm=v"));
}

TEST(Service, PutStyle) {
  sv::Service s;
  const auto id = new_session(s);
  auto r = s.put_style(id, kTwoBand);
  EXPECT_EQ(r.status, 200);
  EXPECT_TRUE(json::parse(r.body)["findings"].empty());

  auto doc = json::parse(kTwoBand);
  doc["styles"][0]["bands"][0]["color"] = {
      {"pattern", {{"length", 1.0}, {"exponent", -1.0},
                   {"color_a", {{"constant", {1, 1, 1}}}}, {"color_b", {{"constant", {0, 0, 0}}}}}}};
  r = s.put_style(id, doc.dump());
  EXPECT_EQ(r.status, 409);
  const auto f = json::parse(r.body)["findings"][0];
  EXPECT_EQ(f["pointer"], "/styles/0/bands/0/color/pattern/exponent");
  EXPECT_NE(f["message"].get<std::string>().find("c must be > 0"), std::string::npos);

  EXPECT_EQ(s.put_style("nope", kTwoBand).status, 404);
}

TEST(Service, RenderContract) {
  sv::Service s;
  const auto id = new_session(s);
  EXPECT_EQ(s.render(id, kRender).status, 422);
  EXPECT_EQ(s.render("nope", kRender).status, 404);
  ASSERT_EQ(s.put_style(id, kTwoBand).status, 200);

  const auto a = s.render(id, kRender);
  const auto b = s.render(id, kRender);
  ASSERT_EQ(a.status, 200);
  EXPECT_EQ(a.content_type, "image/png");
  EXPECT_TRUE(a.body == b.body);
  EXPECT_NE(a.headers.at("X-Render-Millis").find("raster="), std::string::npos);
  const std::vector<std::uint8_t> bytes(a.body.begin(), a.body.end());
  const auto img = ss::raster::decode_png(bytes);
  EXPECT_EQ(img.width, 64);
  EXPECT_EQ(img.height, 64);

  auto bad = json::parse(kRender);
  bad["width"] = 0;
  EXPECT_EQ(s.render(id, bad.dump()).status, 400);
}

TEST(Service, PhaseChangesDashedRender) {
  sv::Service s;
  const auto id = new_session(s);
  ASSERT_EQ(s.put_style(id, kDashed).status, 200);
  auto req = json::parse(kRender);
  req["phase"] = 0.0;
  const auto a = s.render(id, req.dump());
  req["phase"] = 0.25;
  const auto b = s.render(id, req.dump());
  ASSERT_EQ(a.status, 200);
  ASSERT_EQ(b.status, 200);
  EXPECT_TRUE(a.body != b.body);
}

TEST(Service, StyleEditsDoNotRetraceAndSwapAtomically) {
  sv::Service s;
  const auto id = new_session(s);
  const auto session = s.find(id);
  const auto* lines_before = &session->lines();
  const auto vertices = session->lines().vertex_count();
  ASSERT_EQ(s.put_style(id, kTwoBand).status, 200);
  const std::string white = s.render(id, kRender).body;
  ASSERT_EQ(s.put_style(id, kDashed).status, 200);
  const std::string dashed = s.render(id, kRender).body;
  ASSERT_TRUE(white != dashed);

  // Renders racing style swaps must produce one of the two complete images.
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    for (int i = 0; i < 40 && !stop; ++i) s.put_style(id, i % 2 ? kTwoBand : kDashed);
  });
  for (int i = 0; i < 20; ++i) {
    const auto body = s.render(id, kRender).body;
    EXPECT_TRUE(body == white || body == dashed);
  }
  stop = true;
  writer.join();
  EXPECT_EQ(&session->lines(), lines_before);
  EXPECT_EQ(session->lines().vertex_count(), vertices);
}

TEST(Service, HttpRoundTrip) {
  sv::Service s;
  sv::HttpServer server(s);
  ASSERT_TRUE(server.bind("127.0.0.1", 0));
  std::thread loop([&] { server.listen(); });
  httplib::Client client("127.0.0.1", server.port());
  for (int i = 0; i < 100 && !client.Get("/colormaps"); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));

  auto maps = client.Get("/colormaps");
  ASSERT_TRUE(maps);
  EXPECT_EQ(maps->status, 200);
  EXPECT_FALSE(json::parse(maps->body).empty());
  auto presets = client.Get("/style-presets");
  ASSERT_TRUE(presets);
  EXPECT_EQ(json::parse(presets->body)["shapes"].size(), 5u);

  auto created = client.Post("/sessions", kSession, "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["session_id"];
  auto put = client.Put(("/sessions/" + id + "/style").c_str(), kTwoBand, "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 200);
  auto img = client.Post(("/sessions/" + id + "/render").c_str(), kRender, "application/json");
  ASSERT_TRUE(img);
  EXPECT_EQ(img->status, 200);
  EXPECT_EQ(img->get_header_value("Content-Type"), "image/png");
  EXPECT_TRUE(img->has_header("X-Render-Millis"));
  auto missing = client.Post("/sessions/zzz/render", kRender, "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  loop.join();
}
