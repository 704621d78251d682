#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xray/core/geometry.hpp"

namespace xray {

enum class ObjectClass { Vehicle, Pedestrian, Cyclist };

std::string_view to_string(ObjectClass c);
/// Throws Error(Format) for names outside the vocabulary.
ObjectClass parse_object_class(std::string_view name);

struct DetectedInstance {
  BoundingBox3D box;
  ObjectClass label = ObjectClass::Vehicle;
  std::optional<double> score;
  std::optional<std::int64_t> instance_id;

  friend bool operator==(const DetectedInstance&, const DetectedInstance&) = default;
};

/// Ego -> global pose, kept in the quaternion form it is serialized in so
/// that manifests round-trip exactly.
struct EgoPose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Vec3 translation = Vec3::Zero();

  static EgoPose from_yaw(double yaw, const Vec3& t);
  RigidTransform transform() const { return RigidTransform::from_quaternion(rotation, translation); }

  friend bool operator==(const EgoPose& a, const EgoPose& b) {
    return a.rotation.coeffs() == b.rotation.coeffs() && a.translation == b.translation;
  }
};

struct Frame {
  std::int64_t index = 0;
  std::int64_t timestamp_us = 0;
  EgoPose ego_pose;
  PointCloud cloud;                          ///< ego frame
  std::vector<DetectedInstance> instances;   ///< boxes in ego frame
  /// Set on fused frames: the first `original_point_count` points are the
  /// untouched input frame, everything after was added by fusion.
  std::optional<std::size_t> original_point_count;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Sequence {
  std::string name;
  std::vector<Frame> frames;

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

/// Frame indices 0..n-1 and strictly increasing timestamps.
void validate_sequence(const Sequence& seq);

/// Instance box lifted into the global frame via the frame's ego pose.
BoundingBox3D global_box(const Frame& frame, std::size_t instance_index);

struct Occurrence {
  std::size_t frame_index = 0;
  std::size_t instance_index = 0;

  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

struct Track {
  std::int64_t track_id = 0;
  std::vector<Occurrence> occurrences;  ///< ascending frame_index

  friend bool operator==(const Track&, const Track&) = default;
};

}  // namespace xray
