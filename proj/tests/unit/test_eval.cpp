#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "xray/completion/fusion.hpp"
#include "xray/core/error.hpp"
#include "xray/eval/metrics.hpp"
#include "xray/simulate/scene.hpp"

using namespace xray;
using testing::cloud_of;

namespace {

double brute_chamfer(const PointCloud& a, const PointCloud& b) {
  auto side = [](const PointCloud& x, const PointCloud& y) {
    double s = 0;
    for (const auto& p : x) {
      double best = INFINITY;
      for (const auto& q : y) best = std::min(best, (p.position() - q.position()).norm());
      s += best;
    }
    return s / static_cast<double>(x.size());
  };
  return 0.5 * (side(a, b) + side(b, a));
}

Frame blank(std::int64_t i) {
  Frame f;
  f.index = i;
  f.timestamp_us = i;
  return f;
}

}  // namespace

TEST_CASE("coverage examples") {
  std::mt19937_64 gen(1);
  const auto gt = testing::random_cloud(gen, 300, 1.0);
  CHECK(coverage(gt, gt, 0.01) == 1.0);
  auto far = gt;
  for (auto& p : far.points) p.x += 100;
  CHECK(coverage(far, gt, 0.5) == 0.0);

  PointCloud split = gt, half;
  for (std::size_t i = 150; i < 300; ++i) split.points[i].x += 100;
  for (std::size_t i = 0; i < 150; ++i) half.points.push_back(split[i]);
  CHECK(coverage(half, split, 0.5) == 0.5);
  CHECK(coverage(PointCloud{}, gt, 0.5) == 0.0);
  CHECK_THROWS_AS(coverage(gt, PointCloud{}, 0.1), Error);
}

TEST_CASE("coverage is monotone in radius and in added points") {
  std::mt19937_64 gen(2);
  const auto gt = testing::random_cloud(gen, 400, 2.0);
  auto completed = testing::random_cloud(gen, 50, 2.0);
  double prev = 0;
  for (double r : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double c = coverage(completed, gt, r);
    CHECK(c >= prev);
    prev = c;
  }
  prev = coverage(completed, gt, 0.3);
  for (int k = 0; k < 10; ++k) {
    completed.append(testing::random_cloud(gen, 20, 2.0));
    const double c = coverage(completed, gt, 0.3);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("chamfer examples") {
  std::mt19937_64 gen(3);
  const auto a = testing::random_cloud(gen, 100, 3.0);
  CHECK(chamfer(a, a) == 0.0);
  CHECK(chamfer(cloud_of({{0, 0, 0}}), cloud_of({{1, 0, 0}})) == 1.0);
  CHECK(chamfer(cloud_of({{0, 0, 0}, {2, 0, 0}}), cloud_of({{1, 0, 0}})) == 1.0);
}

TEST_CASE("chamfer matches brute force and is symmetric") {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 30; ++i) {
    const auto a = testing::random_cloud(gen, 80 + i, 2.0 + i);
    auto b = testing::random_cloud(gen, 60, 1.0);
    for (auto& p : b.points) p.x += i;
    CHECK(chamfer(a, b) == doctest::Approx(brute_chamfer(a, b)).epsilon(1e-12));
    CHECK(chamfer(a, b) == doctest::Approx(chamfer(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("tracking_score examples") {
  Sequence seq;
  for (int f = 0; f < 6; ++f) {
    auto fr = blank(f);
    fr.instances = {{BoundingBox3D(Vec3(0, 0, 0), {1, 1, 1}, 0), ObjectClass::Vehicle, 1.0, 1},
                    {BoundingBox3D(Vec3(9, 0, 0), {1, 1, 1}, 0), ObjectClass::Vehicle, 1.0, 2}};
    seq.frames.push_back(fr);
  }
  std::vector<Track> truth{{1, {}}, {2, {}}};
  for (std::size_t f = 0; f < 6; ++f) {
    truth[0].occurrences.push_back({f, 0});
    truth[1].occurrences.push_back({f, 1});
  }
  auto s = tracking_score(seq, truth, truth);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);

  std::vector<Track> singles;
  for (std::size_t f = 0; f < 6; ++f) {
    for (std::size_t i = 0; i < 2; ++i) singles.push_back({static_cast<std::int64_t>(singles.size()), {{f, i}}});
  }
  s = tracking_score(seq, singles, truth);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 0.0);

  // Identities swap between frames 2 and 3: 2 of the 10 links are wrong.
  std::vector<Track> swapped{{0, {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}}},
                             {1, {{0, 1}, {1, 1}, {2, 1}, {3, 0}, {4, 0}, {5, 0}}}};
  s = tracking_score(seq, swapped, truth);
  CHECK(s.precision == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(s.recall == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("transform_error examples") {
  const auto t = RigidTransform::from_yaw(0.3, {1, 2, 3});
  auto e = transform_error(t, t);
  CHECK(e.rotation_deg <= 1e-12);
  CHECK(e.translation_m <= 1e-12);

  e = transform_error(RigidTransform::from_yaw(0.3 + 10 * kPi / 180, {1, 2, 3}), t);
  CHECK(e.rotation_deg == doctest::Approx(10.0).epsilon(1e-9));

  // Right-composed 5 degree / 0.3 m correction, error computed with 4x4 matrices.
  const auto delta = RigidTransform::from_yaw(5 * kPi / 180, {0.3, 0, 0});
  const auto est = compose(t, delta);
  Eigen::Matrix4d mt = Eigen::Matrix4d::Identity(), md = Eigen::Matrix4d::Identity();
  mt.topLeftCorner<3, 3>() = t.rotation();
  mt.topRightCorner<3, 1>() = t.translation();
  md.topLeftCorner<3, 3>() = delta.rotation();
  md.topRightCorner<3, 1>() = delta.translation();
  const Eigen::Matrix4d err = (mt * md) * mt.inverse();
  e = transform_error(est, t);
  CHECK(e.rotation_deg == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(e.translation_m == doctest::Approx(err.topRightCorner<3, 1>().norm()).epsilon(1e-12));
}

TEST_CASE("fused coverage is never below the best single frame") {
  OrbitSceneParams p;
  p.n_frames = 12;
  const auto scene = generate(orbit_scene_config(p));
  const auto raw = evaluate_sequence(scene.sequence, scene.truth, 0.1);
  FusionConfig cfg;
  cfg.subsample_factor = INFINITY;
  const auto fused = run_pipeline(scene.sequence, cfg, TrackingMode::Greedy);
  const auto rep = evaluate_sequence(fused.sequence, scene.truth, 0.1, fused.tracks);
  REQUIRE(rep.objects.size() == 1);
  CHECK(rep.objects[0].coverage_min >= raw.objects[0].coverage_max);
  REQUIRE(rep.tracking.has_value());
  CHECK(rep.tracking->precision == 1.0);
  CHECK(rep.tracking->recall == 1.0);
  CHECK(rep.objects[0].chamfer_mean.has_value());
}
