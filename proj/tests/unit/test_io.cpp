#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "xray/core/error.hpp"
#include "xray/io/files.hpp"
#include "xray/io/sequence_io.hpp"
#include "xray/simulate/scene.hpp"

using namespace xray;
using testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

// Storage rounds coordinates to float32; the in-memory fixture does the same
// so that a round trip must be exact.
PointCloud float_cloud(std::mt19937_64& gen, std::size_t n) {
  auto pc = testing::random_cloud(gen, n, 50.0);
  for (auto& p : pc.points) {
    p.x = static_cast<float>(p.x);
    p.y = static_cast<float>(p.y);
    p.z = static_cast<float>(p.z);
    p.intensity = static_cast<float>(p.intensity);
  }
  return pc;
}


ErrorCode code_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

struct Ply {
  std::size_t declared = 0;
  std::vector<std::string> properties;
  std::vector<std::array<double, 6>> rows;
};

// Minimal ASCII PLY reader written against the format description only.
Ply parse_ply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Ply ply;
  std::getline(in, line);
  REQUIRE(line == "ply");
  bool ascii = false;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string kind;
      ls >> kind;
      ascii = kind == "ascii";
    } else if (word == "element") {
      std::string name;
      ls >> name >> ply.declared;
      REQUIRE(name == "vertex");
    } else if (word == "property") {
      std::string type, name;
      ls >> type >> name;
      ply.properties.push_back(type + " " + name);
    }
  }
  REQUIRE(ascii);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::array<double, 6> row{};
    for (auto& v : row) ls >> v;
    REQUIRE(!ls.fail());
    ply.rows.push_back(row);
  }
  return ply;
}

}  // namespace

TEST_CASE("sequence round trip on a simulator scene") {
  TempDir dir;
  auto cfg = orbit_scene_config({});
  cfg.ground_half_extent = 20;
  const auto scene = generate(cfg);
  io::write_sequence(scene.sequence, dir.path());
  const auto back = io::read_sequence(dir.path());
  CHECK(back.name == scene.sequence.name);
  REQUIRE(back.frames.size() == scene.sequence.frames.size());
  for (std::size_t f = 0; f < back.frames.size(); ++f) {
    const auto& a = back.frames[f];
    const auto& b = scene.sequence.frames[f];
    CHECK(a.instances == b.instances);
    CHECK(a.ego_pose == b.ego_pose);
    REQUIRE(a.cloud.size() == b.cloud.size());
    for (std::size_t i = 0; i < a.cloud.size(); ++i) {
      CHECK(a.cloud[i].x == static_cast<float>(b.cloud[i].x));
      CHECK(a.cloud[i].intensity == static_cast<float>(b.cloud[i].intensity));
    }
  }
  // Second generation is exact.
  TempDir again;
  io::write_sequence(back, again.path());
  CHECK(io::read_sequence(again.path()) == back);
  CHECK(slurp(dir / "manifest.json") == slurp(again / "manifest.json"));
  CHECK(slurp(dir / "frame_000003.bin") == slurp(again / "frame_000003.bin"));
}

TEST_CASE("float-exact sequences round trip bit-exactly") {
  std::mt19937_64 gen(5);
  Sequence seq;
  seq.name = "fixture";
  for (int f = 0; f < 3; ++f) {
    Frame fr;
    fr.index = f;
    fr.timestamp_us = 1700000000000000 + f * 100000;
    fr.ego_pose = EgoPose::from_yaw(0.1 * f + 0.123456789, {1.0 / 3.0, -2.5e-7, 1e6});
    fr.cloud = float_cloud(gen, 10 * f);
    fr.instances.push_back({BoundingBox3D({0.1, 0.2, 0.3}, {4.1, 1.9, 1.55}, -3.0), ObjectClass::Cyclist, 0.37, -4});
    fr.instances.push_back({BoundingBox3D({5, 5, 5}, {1, 1, 1}, 1.0), ObjectClass::Pedestrian, {}, {}});
    if (f == 1) fr.original_point_count = 4;
    seq.frames.push_back(fr);
  }
  TempDir dir;
  io::write_sequence(seq, dir.path());
  CHECK(io::read_sequence(dir.path()) == seq);
}

TEST_CASE("empty sequence round trips") {
  TempDir dir;
  Sequence seq;
  seq.name = "empty";
  io::write_sequence(seq, dir.path());
  const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(doc["format_version"] == 1);
  CHECK(doc["frames"].empty());
  CHECK(io::read_sequence(dir.path()) == seq);
}

TEST_CASE("point blob size law") {
  TempDir dir;
  std::string bytes(32, '\0');
  const float one = 1.0f;
  std::memcpy(bytes.data() + 16, &one, 4);
  spit(dir / "b.bin", bytes);
  const auto pc = io::read_point_blob(dir / "b.bin");
  REQUIRE(pc.size() == 2);
  CHECK(pc[1].x == 1.0);
  spit(dir / "c.bin", std::string(33, '\0'));
  CHECK(code_of([&] { io::read_point_blob(dir / "c.bin"); }) == ErrorCode::Format);
  CHECK(code_of([&] { io::read_point_blob(dir / "missing.bin"); }) == ErrorCode::Io);
}

TEST_CASE("malformed manifests produce field-level errors") {
  TempDir dir;
  Sequence seq;
  seq.name = "m";
  Frame fr;
  fr.cloud.points.push_back({1, 2, 3, 0.5});
  fr.instances.push_back({BoundingBox3D({0, 0, 0}, {1, 1, 1}, 0), ObjectClass::Vehicle, 1.0, 1});
  seq.frames.push_back(fr);
  io::write_sequence(seq, dir.path());
  const auto good = nlohmann::json::parse(slurp(dir / "manifest.json"));

  auto expect = [&](nlohmann::json doc, ErrorCode code, const std::string& needle) {
    spit(dir / "manifest.json", doc.dump());
    std::string msg;
    CHECK(code_of([&] { io::read_sequence(dir.path()); }, &msg) == code);
    CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
  };
  auto doc = good;
  doc["format_version"] = 2;
  expect(doc, ErrorCode::Format, "format_version");
  doc = good;
  doc["frames"][0].erase("timestamp_us");
  expect(doc, ErrorCode::Format, "$.frames[0]");
  doc = good;
  doc["frames"][0]["instances"][0]["class"] = "truck";
  expect(doc, ErrorCode::Format, "$.frames[0].instances[0]");
  doc = good;
  doc["frames"][0]["instances"][0]["box"]["l"] = -1;
  expect(doc, ErrorCode::Format, "$.frames[0].instances[0].box");
  doc = good;
  doc["frames"][0]["ego_pose"]["quaternion"] = {1, 1, 0, 0};
  expect(doc, ErrorCode::Format, "quaternion");
  doc = good;
  doc["frames"][0]["points_file"] = "nowhere.bin";
  expect(doc, ErrorCode::Io, "nowhere.bin");
  spit(dir / "manifest.json", "{ not json");
  CHECK(code_of([&] { io::read_sequence(dir.path()); }) == ErrorCode::Format);
}

TEST_CASE("tracks and ground truth round trip") {
  TempDir dir;
  const std::vector<Track> tracks{{3, {{0, 1}, {1, 0}}}, {-8, {{4, 2}}}};
  io::write_tracks(dir / "t.json", tracks);
  CHECK(io::read_tracks(dir / "t.json") == tracks);

  auto cfg = orbit_scene_config({});
  const auto scene = generate(cfg);
  io::write_ground_truth(scene.truth, dir.path());
  const auto gt = io::read_ground_truth(dir.path());
  CHECK(gt.instance_ids == scene.truth.instance_ids);
  CHECK(gt.tracks == scene.truth.tracks);
  CHECK(gt.global_boxes == scene.truth.global_boxes);
  REQUIRE(gt.full_surfaces.size() == 1);
  CHECK(gt.full_surfaces[0].size() == scene.truth.full_surfaces[0].size());
}

TEST_CASE("tensor files round trip and validate") {
  TempDir dir;
  std::mt19937_64 gen(6);
  std::normal_distribution<double> g(0, 10);
  std::vector<double> v(2 * 3 * 4);
  for (auto& x : v) x = static_cast<float>(g(gen));
  const Tensor t({2, 3, 4}, v);
  io::write_tensor(dir / "a.xrtn", t);
  CHECK(io::read_tensor(dir / "a.xrtn") == t);
  const auto bytes = slurp(dir / "a.xrtn");
  CHECK(bytes.substr(0, 4) == "XRTN");
  CHECK(bytes.size() == 8 + 3 * 4 + 24 * 4);

  io::write_tensor(dir / "s.xrtn", Tensor::scalar(2.5));
  CHECK(io::read_tensor(dir / "s.xrtn") == Tensor::scalar(2.5));

  spit(dir / "bad.xrtn", bytes.substr(0, bytes.size() - 4));
  CHECK(code_of([&] { io::read_tensor(dir / "bad.xrtn"); }) == ErrorCode::Format);
  spit(dir / "magic.xrtn", "XRTX" + bytes.substr(4));
  CHECK(code_of([&] { io::read_tensor(dir / "magic.xrtn"); }) == ErrorCode::Format);
}

TEST_CASE("PLY export examples") {
  TempDir dir;
  io::export_ply(PointCloud{}, dir / "e.ply", {});
  auto ply = parse_ply(slurp(dir / "e.ply"));
  CHECK(ply.declared == 0);
  CHECK(ply.rows.empty());
  CHECK(ply.properties == std::vector<std::string>{"float x", "float y", "float z", "uchar red", "uchar green",
                                                   "uchar blue"});

  io::export_ply(testing::cloud_of({{1, 2, 3}}), dir / "one.ply", {});
  ply = parse_ply(slurp(dir / "one.ply"));
  CHECK(ply.declared == 1);
  CHECK(ply.rows.size() == 1);
}

TEST_CASE("PLY coordinates re-parse exactly") {
  TempDir dir;
  std::mt19937_64 gen(7);
  const auto pc = float_cloud(gen, 500);
  io::export_ply(pc, dir / "p.ply", {10, 20, 30}, 400);
  const auto ply = parse_ply(slurp(dir / "p.ply"));
  REQUIRE(ply.rows.size() == pc.size());
  CHECK(ply.declared == pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    CHECK(static_cast<float>(ply.rows[i][0]) == static_cast<float>(pc[i].x));
    CHECK(static_cast<float>(ply.rows[i][1]) == static_cast<float>(pc[i].y));
    CHECK(static_cast<float>(ply.rows[i][2]) == static_cast<float>(pc[i].z));
    CHECK(ply.rows[i][3] == (i < 400 ? 10 : 230));
  }
  CHECK(code_of([&] { io::export_ply(pc, dir / "no" / "such" / "dir.ply", {}); }) == ErrorCode::Io);
}

TEST_CASE("scene configs parse with field-level errors") {
  const auto cfg = io::parse_scene_config(R"({
    "name": "t", "n_frames": 3, "seed": 4,
    "ego_trajectory": {"orbit": {"center": [0, 0, 0], "radius": 8, "height": 2}},
    "objects": [{"class": "cyclist", "size": [2, 0.8, 1.7], "trajectory": {"linear": {"start": [1, 2, 0.85], "velocity": [10, 0, 0]}}}]
  })");
  CHECK(cfg.n_frames == 3);
  CHECK(cfg.objects[0].label == ObjectClass::Cyclist);
  CHECK(cfg.objects[0].trajectory[2].center.x() == doctest::Approx(3.0));
  CHECK(cfg.ego_trajectory.size() == 3);

  std::string msg;
  CHECK(code_of([&] { io::parse_scene_config(R"({"n_frames": 2, "ego_trajectory": {"static": {"center": [0,0,0]}}, "objects": [{"size": [1, "x", 1], "trajectory": {"static": {"center": [0,0,0]}}}]})"); },
                &msg) == ErrorCode::Format);
  CHECK_MESSAGE(msg.find("$.objects[0].size") != std::string::npos, msg);
}
