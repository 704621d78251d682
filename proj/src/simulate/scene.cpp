#include "xray/simulate/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "xray/core/error.hpp"
#include "xray/core/parallel.hpp"

namespace xray {

namespace {

constexpr double kInset = 1e-5;
constexpr std::uint64_t kTruthStream = 0x7472757468ULL;
constexpr std::uint64_t kFrameStream = 0x6672616d65ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

/// One sampleable surface patch of a canonical shape.
struct Patch {
  enum Kind { PlaneX, PlaneY, PlaneZ, CylSide, CylCap } kind;
  double sign = 1.0;  ///< +1 / -1 face
  double area = 0.0;
};

struct ShapeGeometry {
  ShapeKind shape;
  double hx, hy, hz;  ///< inset half extents; hx is the radius for cylinders
  std::vector<Patch> patches;
};

ShapeGeometry geometry_of(ShapeKind shape, const BoxSize& size, bool bottom_face) {
  if (!(size.length > 2 * kInset && size.width > 2 * kInset && size.height > 2 * kInset)) {
    fail(ErrorCode::InvalidArgument, "object sizes must be positive");
  }
  ShapeGeometry g{shape, 0.5 * size.length - kInset, 0.5 * size.width - kInset, 0.5 * size.height - kInset, {}};
  const double l = size.length, w = size.width, h = size.height;
  if (shape == ShapeKind::Box) {
    g.patches = {{Patch::PlaneX, 1.0, w * h}, {Patch::PlaneX, -1.0, w * h}, {Patch::PlaneY, 1.0, l * h},
                 {Patch::PlaneY, -1.0, l * h}, {Patch::PlaneZ, 1.0, l * w}};
    if (bottom_face) g.patches.push_back({Patch::PlaneZ, -1.0, l * w});
  } else {
    const double r = 0.5 * l;
    g.hy = g.hx;
    g.patches = {{Patch::CylSide, 1.0, 2.0 * kPi * r * h}, {Patch::CylCap, 1.0, kPi * r * r}};
    if (bottom_face) g.patches.push_back({Patch::CylCap, -1.0, kPi * r * r});
  }
  return g;
}

void sample_patch(const ShapeGeometry& g, const Patch& p, Rng& rng, SurfaceSample& out) {
  Vec3 pos = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  switch (p.kind) {
    case Patch::PlaneX:
      pos = {p.sign * g.hx, rng.uniform(-g.hy, g.hy), rng.uniform(-g.hz, g.hz)};
      normal = {p.sign, 0.0, 0.0};
      break;
    case Patch::PlaneY:
      pos = {rng.uniform(-g.hx, g.hx), p.sign * g.hy, rng.uniform(-g.hz, g.hz)};
      normal = {0.0, p.sign, 0.0};
      break;
    case Patch::PlaneZ:
      pos = {rng.uniform(-g.hx, g.hx), rng.uniform(-g.hy, g.hy), p.sign * g.hz};
      normal = {0.0, 0.0, p.sign};
      break;
    case Patch::CylSide: {
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      pos = {g.hx * std::cos(theta), g.hx * std::sin(theta), rng.uniform(-g.hz, g.hz)};
      normal = {std::cos(theta), std::sin(theta), 0.0};
      break;
    }
    case Patch::CylCap: {
      const double rho = g.hx * std::sqrt(rng.uniform());
      const double theta = rng.uniform(0.0, 2.0 * kPi);
      pos = {rho * std::cos(theta), rho * std::sin(theta), p.sign * g.hz};
      normal = {0.0, 0.0, p.sign};
      break;
    }
  }
  out.cloud.points.push_back(Point3::at(pos, rng.uniform(0.2, 0.9)));
  out.normals.push_back(normal);
}

}  // namespace

std::string_view to_string(ShapeKind s) { return s == ShapeKind::Box ? "box" : "cylinder"; }

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "box") return ShapeKind::Box;
  if (name == "cylinder") return ShapeKind::Cylinder;
  fail(ErrorCode::Format, "unknown shape '" + std::string(name) + "'");
}

void validate(const SceneConfig& cfg) {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "scene config: " + what); };
  if (cfg.n_frames < 1) bad("n_frames must be >= 1");
  if (!(cfg.points_per_m2 > 0.0) || !std::isfinite(cfg.points_per_m2)) bad("points_per_m2 must be > 0");
  if (!(cfg.lidar_range > 0.0)) bad("lidar_range must be > 0");
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) bad("noise_sigma must be >= 0");
  if (!(cfg.ground_half_extent >= 0.0)) bad("ground_half_extent must be >= 0");
  if (cfg.ground_half_extent > 0.0 && !(cfg.ground_points_per_m2 > 0.0)) bad("ground_points_per_m2 must be > 0");
  if (cfg.frame_period_us <= 0) bad("frame_period_us must be > 0");
  if (cfg.ego_trajectory.size() != cfg.n_frames) bad("ego_trajectory length must equal n_frames");
  for (std::size_t o = 0; o < cfg.objects.size(); ++o) {
    const auto& obj = cfg.objects[o];
    const std::string name = "objects[" + std::to_string(o) + "]";
    if (obj.trajectory.size() != cfg.n_frames) bad(name + ".trajectory length must equal n_frames");
    if (!(obj.size.length > 0.0 && obj.size.width > 0.0 && obj.size.height > 0.0)) bad(name + ".size must be > 0");
    for (std::size_t q = 0; q < o; ++q) {
      if (cfg.objects[q].instance_id == obj.instance_id) bad(name + ".instance_id is not unique");
    }
  }
}

SurfaceSample sample_surface(ShapeKind shape, const BoxSize& size, bool bottom_face, double points_per_m2, Rng& rng) {
  const auto g = geometry_of(shape, size, bottom_face);
  SurfaceSample out;
  for (const auto& patch : g.patches) {
    const auto n = static_cast<std::size_t>(std::floor(patch.area * points_per_m2 + rng.uniform()));
    for (std::size_t i = 0; i < n; ++i) sample_patch(g, patch, rng, out);
  }
  return out;
}

SurfaceSample sample_surface_count(ShapeKind shape, const BoxSize& size, bool bottom_face, std::size_t count, Rng& rng) {
  const auto g = geometry_of(shape, size, bottom_face);
  double total = 0.0;
  for (const auto& p : g.patches) total += p.area;
  SurfaceSample out;
  for (std::size_t i = 0; i < count; ++i) {
    double pick = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < g.patches.size() && pick >= g.patches[k].area) pick -= g.patches[k++].area;
    sample_patch(g, g.patches[k], rng, out);
  }
  return out;
}

bool segment_hits_box(const Vec3& from, const Vec3& to, const BoundingBox3D& box) {
  const RigidTransform to_local = box.pose().inverse();
  const Vec3 a = to_local.apply(from);
  const Vec3 d = to_local.apply(to) - a;
  const std::array<double, 3> half{0.5 * box.size().length, 0.5 * box.size().width, 0.5 * box.size().height};
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (std::abs(a[i]) > half[i]) return false;
      continue;
    }
    double t1 = (-half[i] - a[i]) / d[i];
    double t2 = (half[i] - a[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
    if (lo >= hi) return false;
  }
  return lo < 1.0 - 1e-9;
}

bool is_visible(const Vec3& sensor, const Vec3& point, const Vec3& normal, double range,
                std::span<const BoundingBox3D> occluders) {
  const Vec3 to_sensor = sensor - point;
  if (to_sensor.norm() > range) return false;
  if (normal.dot(to_sensor) <= 0.0) return false;
  return std::none_of(occluders.begin(), occluders.end(),
                      [&](const BoundingBox3D& b) { return segment_hits_box(sensor, point, b); });
}

BoundingBox3D object_box(const SceneObject& obj, const ObjectPose& pose) {
  BoxSize s = obj.size;
  if (obj.shape == ShapeKind::Cylinder) s.width = s.length;
  return {pose.center, s, pose.yaw};
}

Scene generate(const SceneConfig& cfg) {
  validate(cfg);
  Scene scene;
  auto& truth = scene.truth;
  const std::size_t n_obj = cfg.objects.size();

  for (std::size_t o = 0; o < n_obj; ++o) {
    const auto& obj = cfg.objects[o];
    Rng rng(cfg.seed, kTruthStream, o);
    truth.full_surfaces.push_back(
        sample_surface(obj.shape, object_box(obj, {}).size(), obj.bottom_face, cfg.points_per_m2, rng).cloud);
    truth.instance_ids.push_back(obj.instance_id);
    Track t{obj.instance_id, {}};
    for (std::size_t f = 0; f < cfg.n_frames; ++f) t.occurrences.push_back({f, o});
    truth.tracks.push_back(std::move(t));
  }
  truth.global_boxes.resize(cfg.n_frames);
  for (std::size_t f = 0; f < cfg.n_frames; ++f) {
    for (const auto& obj : cfg.objects) truth.global_boxes[f].push_back(object_box(obj, obj.trajectory[f]));
  }

  scene.sequence.name = cfg.name;
  scene.sequence.frames.resize(cfg.n_frames);
  parallel_for(cfg.n_frames, [&](std::size_t f) {
    Frame& frame = scene.sequence.frames[f];
    frame.index = static_cast<std::int64_t>(f);
    frame.timestamp_us = cfg.start_timestamp_us + static_cast<std::int64_t>(f) * cfg.frame_period_us;
    const auto& ego = cfg.ego_trajectory[f];
    frame.ego_pose = EgoPose::from_yaw(ego.yaw, ego.center);
    const RigidTransform to_ego = frame.ego_pose.transform().inverse();
    const Vec3& sensor = ego.center;
    const auto& boxes = truth.global_boxes[f];

    Rng rng(cfg.seed, kFrameStream, f);
    auto emit = [&](const Vec3& p, double intensity) {
      Vec3 q = p;
      if (cfg.noise_sigma > 0.0) q += cfg.noise_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
      frame.cloud.points.push_back(Point3::at(to_ego.apply(q), intensity));
    };

    std::vector<BoundingBox3D> others;
    for (std::size_t o = 0; o < n_obj; ++o) {
      const auto& obj = cfg.objects[o];
      const auto sample = sample_surface(obj.shape, boxes[o].size(), obj.bottom_face, cfg.points_per_m2, rng);
      const RigidTransform pose = boxes[o].pose();
      others.clear();
      for (std::size_t q = 0; q < n_obj; ++q) {
        if (q != o) others.push_back(boxes[q]);
      }
      for (std::size_t i = 0; i < sample.cloud.size(); ++i) {
        const Vec3 p = pose.apply(sample.cloud[i].position());
        if (is_visible(sensor, p, pose.rotation() * sample.normals[i], cfg.lidar_range, others)) {
          emit(p, sample.cloud[i].intensity);
        }
      }
    }
    if (cfg.ground_half_extent > 0.0) {
      const double e = cfg.ground_half_extent;
      const auto n = static_cast<std::size_t>(std::floor(4.0 * e * e * cfg.ground_points_per_m2 + rng.uniform()));
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p(rng.uniform(-e, e), rng.uniform(-e, e), cfg.ground_z);
        const double intensity = rng.uniform(0.05, 0.2);
        if (is_visible(sensor, p, Vec3::UnitZ(), cfg.lidar_range, boxes)) emit(p, intensity);
      }
    }
    for (std::size_t o = 0; o < n_obj; ++o) {
      frame.instances.push_back(
          {transform_box(to_ego, boxes[o]), cfg.objects[o].label, 1.0, cfg.objects[o].instance_id});
    }
  });
  return scene;
}

Sequence inject_box_noise(const Sequence& seq, double yaw_sigma, double center_sigma, std::uint64_t seed) {
  if (!(yaw_sigma >= 0.0) || !(center_sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "noise sigmas must be >= 0");
  Sequence out = seq;
  for (std::size_t f = 0; f < out.frames.size(); ++f) {
    Rng rng(seed, kNoiseStream, f);
    for (auto& inst : out.frames[f].instances) {
      const double dyaw = rng.normal();
      const Vec3 dc(rng.normal(), rng.normal(), rng.normal());
      if (yaw_sigma == 0.0 && center_sigma == 0.0) continue;
      inst.box = BoundingBox3D(inst.box.center() + center_sigma * dc, inst.box.size(), inst.box.yaw() + yaw_sigma * dyaw);
    }
  }
  return out;
}

SceneConfig orbit_scene_config(const OrbitSceneParams& p) {
  SceneConfig cfg;
  cfg.name = "orbit";
  cfg.n_frames = p.n_frames;
  cfg.points_per_m2 = p.points_per_m2;
  cfg.noise_sigma = p.noise_sigma;
  cfg.seed = p.seed;
  cfg.lidar_range = 4.0 * p.orbit_radius;
  cfg.ground_half_extent = p.ground_half_extent;
  SceneObject car;
  car.size = p.car;
  car.instance_id = 1;
  car.trajectory.assign(p.n_frames, ObjectPose{Vec3(0.0, 0.0, 0.5 * p.car.height), 0.0});
  cfg.objects.push_back(car);
  for (std::size_t f = 0; f < p.n_frames; ++f) {
    const double theta = 2.0 * kPi * static_cast<double>(f) / static_cast<double>(p.n_frames);
    cfg.ego_trajectory.push_back(
        {Vec3(p.orbit_radius * std::cos(theta), p.orbit_radius * std::sin(theta), p.sensor_height), theta + kPi});
  }
  return cfg;
}

}  // namespace xray
