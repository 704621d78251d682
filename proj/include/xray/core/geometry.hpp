#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace xray {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Vec3 position() const { return {x, y, z}; }
  static Point3 at(const Vec3& p, double intensity = 0.0) { return {p.x(), p.y(), p.z(), intensity}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Finite coordinates and intensity in [0, 1].
bool is_valid(const Point3& p);

/// Ordered point list. No operation in this library reorders points implicitly.
struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point3& operator[](std::size_t i) const { return points[i]; }
  Point3& operator[](std::size_t i) { return points[i]; }
  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
  void append(const PointCloud& other) { points.insert(points.end(), other.points.begin(), other.points.end()); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// Proper rigid motion x -> R x + t. The constructor rejects non-orthonormal
/// rotations (per-entry tolerance 1e-9) and reflections.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform translation_only(const Vec3& t) { return {Mat3::Identity(), t}; }
  /// Rotation about +z by `yaw` radians followed by translation.
  static RigidTransform from_yaw(double yaw, const Vec3& t = Vec3::Zero());
  static RigidTransform from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Point3 apply(const Point3& p) const { return Point3::at(apply(p.position()), p.intensity); }

  RigidTransform inverse() const;
  /// Heading of the rotated x axis, atan2(R10, R00).
  double yaw() const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

PointCloud apply_transform(const RigidTransform& t, const PointCloud& pc);

/// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Maps any finite angle into [-pi, pi).
double normalize_angle(double a);

struct BoxSize {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const BoxSize&, const BoxSize&) = default;
};

/// Yaw-only oriented box. Sizes must be positive; yaw is normalized to [-pi, pi).
class BoundingBox3D {
 public:
  BoundingBox3D(const Vec3& center, const BoxSize& size, double yaw);

  const Vec3& center() const { return center_; }
  const BoxSize& size() const { return size_; }
  double yaw() const { return yaw_; }

  /// Box frame -> enclosing frame.
  RigidTransform pose() const { return RigidTransform::from_yaw(yaw_, center_); }

  /// Boundary-inclusive membership.
  bool contains(const Vec3& p) const;

  friend bool operator==(const BoundingBox3D& a, const BoundingBox3D& b) {
    return a.center_ == b.center_ && a.size_ == b.size_ && a.yaw_ == b.yaw_;
  }

 private:
  Vec3 center_;
  BoxSize size_;
  double yaw_;
};

std::vector<std::size_t> points_in_box(const BoundingBox3D& box, const PointCloud& pc);

double box_max_dimension(const BoundingBox3D& box);

/// Re-expresses a box under a rigid motion. Only the heading of the rotation
/// is carried into the yaw; pitch and roll are dropped.
BoundingBox3D transform_box(const RigidTransform& t, const BoundingBox3D& box);

PointCloud select(const PointCloud& pc, std::span<const std::size_t> indices);

}  // namespace xray
