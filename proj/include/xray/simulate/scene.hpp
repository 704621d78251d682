#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xray/core/random.hpp"
#include "xray/sequence.hpp"

namespace xray {

enum class ShapeKind { Box, Cylinder };

std::string_view to_string(ShapeKind s);
ShapeKind parse_shape_kind(std::string_view name);

struct ObjectPose {
  Vec3 center = Vec3::Zero();
  double yaw = 0.0;
};

struct SceneObject {
  ShapeKind shape = ShapeKind::Box;
  /// Cylinders use `length` as the diameter and ignore `width`.
  BoxSize size{4.0, 2.0, 1.5};
  ObjectClass label = ObjectClass::Vehicle;
  std::int64_t instance_id = 0;
  /// Ground-contact objects have no sampled underside unless this is set.
  bool bottom_face = false;
  std::vector<ObjectPose> trajectory;  ///< one pose per frame, global frame
};

struct SceneConfig {
  std::string name = "scene";
  std::size_t n_frames = 1;
  std::vector<SceneObject> objects;
  /// Sensor pose per frame (center = sensor origin, yaw = ego heading).
  std::vector<ObjectPose> ego_trajectory;
  double points_per_m2 = 50.0;
  double lidar_range = 80.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  /// Square ground patch of this half extent around the global origin; 0 disables it.
  double ground_half_extent = 0.0;
  double ground_z = 0.0;
  double ground_points_per_m2 = 2.0;
  std::int64_t start_timestamp_us = 0;
  std::int64_t frame_period_us = 100000;
};

/// Throws Error(InvalidArgument) naming the first offending field.
void validate(const SceneConfig& cfg);

struct SurfaceSample {
  PointCloud cloud;           ///< canonical frame
  std::vector<Vec3> normals;  ///< outward unit normals, canonical frame
};

/// Area-weighted uniform sample with an expected density of `points_per_m2`
/// (stochastic rounding per face). Samples sit 10 micrometers inside the faces
/// so they stay inside the closed box under float32 storage.
SurfaceSample sample_surface(ShapeKind shape, const BoxSize& size, bool bottom_face, double points_per_m2, Rng& rng);

/// Exactly `count` area-weighted uniform samples.
SurfaceSample sample_surface_count(ShapeKind shape, const BoxSize& size, bool bottom_face, std::size_t count, Rng& rng);

/// True when the open segment from `from` to `to` passes through `box`.
bool segment_hits_box(const Vec3& from, const Vec3& to, const BoundingBox3D& box);

/// Per-point LiDAR visibility: within range, facing the sensor, and not
/// hidden behind any of `occluders`.
bool is_visible(const Vec3& sensor, const Vec3& point, const Vec3& normal, double range,
                std::span<const BoundingBox3D> occluders);

/// Oriented box enclosing an object's shape at a pose.
BoundingBox3D object_box(const SceneObject& obj, const ObjectPose& pose);

struct GroundTruth {
  std::vector<PointCloud> full_surfaces;                 ///< per object, canonical frame
  std::vector<std::int64_t> instance_ids;                ///< per object
  std::vector<Track> tracks;                             ///< per object, track_id = instance_id
  std::vector<std::vector<BoundingBox3D>> global_boxes;  ///< [frame][object]
};

struct Scene {
  Sequence sequence;
  GroundTruth truth;
};

/// Deterministic in cfg. Every frame re-samples each object surface (the
/// sensor's hit pattern changes between sweeps), keeps visible samples, adds
/// per-axis Gaussian noise and emits exact ego-frame boxes with instance ids.
Scene generate(const SceneConfig& cfg);

/// Gaussian perturbation of every instance box's yaw and center (per axis).
/// Points are untouched.
Sequence inject_box_noise(const Sequence& seq, double yaw_sigma, double center_sigma, std::uint64_t seed);

struct OrbitSceneParams {
  std::size_t n_frames = 20;
  BoxSize car{4.0, 2.0, 1.5};
  double orbit_radius = 8.0;
  double sensor_height = 2.2;
  double points_per_m2 = 50.0;
  double noise_sigma = 0.005;
  std::uint64_t seed = 1;
  double ground_half_extent = 0.0;
};

/// A static box-car at the origin observed from evenly spaced viewpoints on a
/// circle around it.
SceneConfig orbit_scene_config(const OrbitSceneParams& p);

}  // namespace xray
