/* Copyright 2026 The fundscope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


#include <doctest.h>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "fundscope/image.hpp"
#include "fundscope/util.hpp"
#include "test_support.hpp"

using namespace fundscope;
using namespace fundscope::image;
using testing::code_of;
using testing::TempDir;

namespace {

Image gray(int w, int h, double fill) {
  Image im;
  im.width = w;
  im.height = h;
  im.channels = 1;
  im.pixels.assign(static_cast<std::size_t>(w * h), fill);
  return im;
}

Image stripes(int w, int h) {
  Image im = gray(w, h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) im.pixels[static_cast<std::size_t>(y * w + x)] = x % 2 ? 255.0 : 0.0;
  return im;
}

Image box_blur(const Image& src) {
  Image out = src;
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= src.width || yy >= src.height) continue;
          s += src.at(xx, yy);
          ++n;
        }
      out.pixels[static_cast<std::size_t>(y * src.width + x)] = s / n;
    }
  }
  return out;
}

nlohmann::json face_json(double age, bool smile, double beauty = 60.0) {
  return {{"gender", "Female"},
          {"age", age},
          {"beauty", {{"female_score", beauty}, {"male_score", beauty}}},
          {"smile", {{"value", smile ? 80.0 : 10.0}, {"threshold", 50.0}}},
          {"emotion",
           {{"anger", 0}, {"disgust", 0}, {"fear", 0}, {"happiness", 70}, {"neutral", 30}, {"sadness", 0},
            {"surprise", 0}}}};
}

}  // namespace

TEST_CASE("pnm round trip and errors") {
  Image im;
  im.width = 9;
  im.height = 8;
  im.channels = 3;
  std::mt19937 rng(3);
  for (int i = 0; i < 9 * 8 * 3; ++i) im.pixels.push_back(static_cast<double>(rng() % 256));
  const Image back = decode_pnm(encode_pnm(im));
  CHECK(back.width == 9);
  CHECK(back.height == 8);
  CHECK(back.channels == 3);
  CHECK(back.pixels == im.pixels);
  CHECK(code_of([] { decode_pnm("P3\n1 1\n255\n0 0 0\n"); }) == Errc::InvalidImage);
  CHECK(code_of([] { decode_pnm("P5\n4 4\n255\nab"); }) == Errc::InvalidImage);
  CHECK(code_of([] { decode_pnm("P5 # c\n"); }) == Errc::InvalidImage);
  const Image commented = decode_pnm(std::string("P5\n# note\n1 1\n255\n") + '\x7f');
  CHECK(commented.pixels == std::vector<double>{127.0});
}

TEST_CASE("builtin quality examples") {
  const auto flat = builtin_quality_score(gray(16, 16, 90.0));
  CHECK(flat.technical == 1.0);
  CHECK(flat.aesthetic == 1.0);
  CHECK(flat.provider == kBuiltinQualityProvider);

  // Alternating 0/255 columns: every horizontal step is 255, luma SD is 127.5.
  const auto q = builtin_quality_score(stripes(8, 8));
  CHECK(q.technical == doctest::Approx(1.0 + 9.0 * (1.0 - std::exp(-255.0 / 64.0))).epsilon(1e-12));
  CHECK(q.aesthetic == doctest::Approx(5.5).epsilon(1e-12));

  CHECK(code_of([] { builtin_quality_score(gray(7, 30, 0.0)); }) == Errc::InvalidImage);
}

TEST_CASE("builtin quality properties") {
  const Image sharp = stripes(32, 32);
  const auto s = builtin_quality_score(sharp);
  const auto b = builtin_quality_score(box_blur(sharp));
  CHECK(s.technical > b.technical);

  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    Image im;
    im.width = 8 + static_cast<int>(rng() % 20);
    im.height = 8 + static_cast<int>(rng() % 20);
    im.channels = trial % 2 ? 3 : 1;
    const auto count = static_cast<std::size_t>(im.width * im.height * im.channels);
    for (std::size_t i = 0; i < count; ++i) im.pixels.push_back(static_cast<double>(rng() % 256));
    const auto qs = builtin_quality_score(im);
    CHECK(qs.aesthetic >= 1.0);
    CHECK(qs.aesthetic <= 10.0);
    CHECK(qs.technical >= 1.0);
    CHECK(qs.technical <= 10.0);
    // Equal channels carry no colour.
    if (im.channels == 1) {
      Image rgb = im;
      rgb.channels = 3;
      rgb.pixels.clear();
      for (double v : im.pixels) rgb.pixels.insert(rgb.pixels.end(), {v, v, v});
      CHECK(quality_components(rgb).colorfulness_norm == doctest::Approx(0.0));
      CHECK(quality_components(im).colorfulness_norm == 0.0);
    }
    // Brightness offsets change neither gradients nor contrast.
    if (im.channels == 1) {
      Image shifted = im;
      for (double& v : shifted.pixels) v = v * 0.5 + 40.0;
      Image halved = im;
      for (double& v : halved.pixels) v = v * 0.5;
      const auto a = quality_components(shifted), c = quality_components(halved);
      CHECK(a.mean_gradient == doctest::Approx(c.mean_gradient).epsilon(1e-12));
      CHECK(a.contrast_norm == doctest::Approx(c.contrast_norm).epsilon(1e-12));
    }
  }
}

TEST_CASE("builtin provider reads pnm files") {
  TempDir dir("quality");
  write_file(dir / "a.pgm", encode_pnm(stripes(8, 8)));
  write_file(dir / "bad.pgm", "P5\n1");
  const BuiltinQualityProvider provider(dir.path());
  REQUIRE(provider.score("a.pgm").has_value());
  CHECK(provider.score("a.pgm")->aesthetic == doctest::Approx(5.5));
  CHECK_FALSE(provider.score("bad.pgm").has_value());
  CHECK_FALSE(provider.score("missing.pgm").has_value());
  CHECK_FALSE(provider.score("photo.jpg").has_value());
}

TEST_CASE("precomputed quality") {
  TempDir dir("pre");
  write_file(dir / "q.csv", "image_ref,aesthetic,technical\nimg1,4.65,5.28\nimg2,1,10\n");
  const auto table = load_precomputed_quality(dir / "q.csv");
  REQUIRE(table.size() == 2);
  CHECK(table.at("img1").aesthetic == 4.65);
  CHECK(table.at("img1").technical == 5.28);
  write_file(dir / "bad.csv", "image_ref,aesthetic,technical\nimg1,12,5\n");
  CHECK(code_of([&] { load_precomputed_quality(dir / "bad.csv"); }) == Errc::RangeError);
  write_file(dir / "low.csv", "image_ref,aesthetic,technical\nimg1,5,0.5\n");
  CHECK(code_of([&] { load_precomputed_quality(dir / "low.csv"); }) == Errc::RangeError);

  std::vector<Campaign> cs(3);
  cs[0].cover_image = "img1";
  cs[1].cover_image = "unknown";
  const PrecomputedQualityProvider provider(table);
  const auto fv = quality_features(cs, provider, Execution::Serial);
  CHECK(fv[0].get(kAestheticFeature) == 4.65);
  CHECK(fv[0].get(kQualityMissing) == 0.0);
  CHECK_FALSE(fv[1].contains(kAestheticFeature));
  CHECK(fv[1].get(kQualityMissing) == 1.0);
  CHECK(fv[2].get(kQualityMissing) == 1.0);
  const auto par = quality_features(cs, provider, Execution::Parallel);
  for (std::size_t i = 0; i < cs.size(); ++i) CHECK(par[i].size() == fv[i].size());
}

TEST_CASE("face response parsing") {
  nlohmann::json doc = nlohmann::json::array({face_json(22, true), face_json(18, false)});
  const auto faces = parse_face_response(doc.dump());
  REQUIRE(faces.size() == 2);
  CHECK(faces[0].age == 22.0);
  CHECK(faces[0].smile);
  CHECK_FALSE(faces[1].smile);
  CHECK(faces[0].emotion[3] == 70.0);
  CHECK(parse_face_response(serialize_faces(faces)) == faces);
  CHECK(parse_face_response("[]").empty());

  auto bad = doc;
  bad[0]["emotion"].erase("surprise");
  CHECK(code_of([&] { parse_face_response(bad.dump()); }) == Errc::SchemaError);
  bad = doc;
  bad[0]["emotion"]["happiness"] = 60;
  CHECK(code_of([&] { parse_face_response(bad.dump()); }) == Errc::SchemaError);
  bad = doc;
  bad[0]["age"] = 130;
  CHECK(code_of([&] { parse_face_response(bad.dump()); }) == Errc::SchemaError);
  bad = doc;
  bad[0]["gender"] = "robot";
  CHECK(code_of([&] { parse_face_response(bad.dump()); }) == Errc::SchemaError);
  CHECK(code_of([] { parse_face_response("{\"faces\": []}"); }) == Errc::SchemaError);
  CHECK(code_of([] { parse_face_response("[{"); }) == Errc::SchemaError);
  // Small rounding in the emotion total is tolerated.
  auto near = doc;
  near[0]["emotion"]["neutral"] = 30.4;
  CHECK(parse_face_response(near.dump()).size() == 2);
}

TEST_CASE("face aggregation") {
  const auto faces = parse_face_response(nlohmann::json::array({face_json(22, true, 40), face_json(18, false, 60)}).dump());
  const auto agg = aggregate_face_features(faces);
  CHECK(agg.num_faces == 2);
  CHECK(*agg.mean_age == 20.0);
  CHECK(*agg.mean_beauty == 50.0);
  CHECK(agg.any_smile == 1);
  CHECK(agg.is_child == 0);
  CHECK((*agg.mean_emotion)[3] == 70.0);

  auto reversed = faces;
  std::reverse(reversed.begin(), reversed.end());
  const auto agg2 = aggregate_face_features(reversed);
  CHECK(*agg2.mean_age == *agg.mean_age);
  CHECK(*agg2.mean_beauty == *agg.mean_beauty);
  CHECK(*agg2.mean_emotion == *agg.mean_emotion);

  const auto child = aggregate_face_features(parse_face_response(nlohmann::json::array({face_json(9, false)}).dump()));
  CHECK(child.is_child == 1);
  const auto ten = aggregate_face_features(parse_face_response(nlohmann::json::array({face_json(10, false)}).dump()));
  CHECK(ten.is_child == 0);

  const auto none = aggregate_face_features({});
  CHECK(none.num_faces == 0);
  CHECK_FALSE(none.mean_age.has_value());
  const auto fv = to_feature_vector(none);
  CHECK(fv.get(kNumFacesFeature) == 0.0);
  CHECK_FALSE(fv.contains(kMeanAgeFeature));
  CHECK(fv.get(kFaceMissing) == 0.0);
}

TEST_CASE("stub provider and face features") {
  TempDir dir("faces");
  const auto faces = parse_face_response(nlohmann::json::array({face_json(30, true)}).dump());
  write_sidecar(dir.path(), "a.jpg", faces);
  const StubFaceProvider stub(dir.path());
  CHECK(stub.analyze("a.jpg") == faces);
  CHECK(stub.analyze("b.jpg").empty());
  write_file(sidecar_path(dir.path(), "bad.jpg"), "[1]");
  CHECK(code_of([&] { stub.analyze("bad.jpg"); }) == Errc::SchemaError);

  std::vector<Campaign> cs(3);
  cs[0].cover_image = "a.jpg";
  cs[1].cover_image = "b.jpg";
  const auto fv = face_features(cs, stub, 2);
  CHECK(fv[0].get(kNumFacesFeature) == 1.0);
  CHECK(fv[0].get("face_emotion_happiness") == 70.0);
  CHECK(fv[1].get(kNumFacesFeature) == 0.0);
  CHECK(fv[1].get(kFaceMissing) == 0.0);
  CHECK(fv[2].size() == 1);
  CHECK(fv[2].get(kFaceMissing) == 1.0);
}

TEST_CASE("remote provider against a local server") {
  TempDir dir("remote");
  write_file(dir / "img.jpg", "not really a jpeg");
  write_file(dir / "flaky.jpg", "x");
  write_file(dir / "broken.jpg", "x");
  const std::string body = nlohmann::json::array({face_json(41, false)}).dump();

  httplib::Server server;
  std::atomic<int> calls{0};
  std::atomic<int> flaky_calls{0};
  server.Post("/detect", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    if (!req.has_file("image_file")) {
      res.status = 400;
      return;
    }
    const auto file = req.get_file_value("image_file");
    if (file.filename == "flaky.jpg" && flaky_calls++ == 0) {
      res.status = 503;
      return;
    }
    if (file.filename == "broken.jpg") {
      res.set_content("[{\"age\": 3}]", "application/json");
      return;
    }
    res.set_content(body, "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteFaceOptions opts;
  opts.base_url = "http://127.0.0.1:" + std::to_string(port);
  opts.image_root = dir.path();
  opts.cache_dir = dir / "cache";
  opts.timeout = std::chrono::milliseconds(2000);
  const RemoteFaceProvider remote(opts);

  const auto faces = remote.analyze("img.jpg");
  REQUIRE(faces.size() == 1);
  CHECK(faces[0].age == 41.0);
  CHECK(std::filesystem::exists(sidecar_path(opts.cache_dir, "img.jpg")));
  const int before = calls.load();
  CHECK(remote.analyze("img.jpg") == faces);
  CHECK(calls.load() == before);

  CHECK(remote.analyze("flaky.jpg").size() == 1);
  CHECK(flaky_calls.load() == 2);
  CHECK(code_of([&] { remote.analyze("broken.jpg"); }) == Errc::SchemaError);

  const auto batch = analyze_batch({"img.jpg", "flaky.jpg", "img.jpg"}, remote, 3);
  CHECK(batch.size() == 3);
  CHECK(batch[2] == faces);

  server.stop();
  worker.join();

  RemoteFaceOptions dead = opts;
  dead.cache_dir.clear();
  dead.timeout = std::chrono::milliseconds(300);
  dead.retries = 1;
  const RemoteFaceProvider unreachable(dead);
  CHECK(code_of([&] { unreachable.analyze("img.jpg"); }) == Errc::ProviderError);
  CHECK(code_of([] { RemoteFaceProvider(RemoteFaceOptions{}); }) == Errc::ConfigError);
}
