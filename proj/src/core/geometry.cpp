#include "xray/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xray/core/error.hpp"

namespace xray {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Format: return "format_error";
    case ErrorCode::NoOverlap: return "no_overlap";
    case ErrorCode::Internal: return "internal_error";
  }
  return "unknown";
}

bool is_valid(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && p.intensity >= 0.0 &&
         p.intensity <= 1.0;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    fail(ErrorCode::InvalidArgument, "rigid transform has non-finite entries");
  }
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    fail(ErrorCode::InvalidArgument, "rotation matrix is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "rotation matrix has determinant != +1");
  }
}

RigidTransform RigidTransform::from_yaw(double yaw, const Vec3& t) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return {r, t};
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  if (q.norm() == 0.0 || !q.coeffs().allFinite()) {
    fail(ErrorCode::InvalidArgument, "quaternion must be finite and nonzero");
  }
  return {q.normalized().toRotationMatrix(), t};
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

double RigidTransform::yaw() const { return std::atan2(rotation_(1, 0), rotation_(0, 0)); }

PointCloud apply_transform(const RigidTransform& t, const PointCloud& pc) {
  PointCloud out;
  out.points.reserve(pc.size());
  for (const auto& p : pc) out.points.push_back(t.apply(p));
  return out;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  // Products of valid rotations stay orthonormal far below the 1e-9 gate.
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

double normalize_angle(double a) {
  if (!std::isfinite(a)) fail(ErrorCode::InvalidArgument, "angle must be finite");
  constexpr double two_pi = 2.0 * kPi;
  double r = a - two_pi * std::floor((a + kPi) / two_pi);
  if (r >= kPi) r -= two_pi;
  if (r < -kPi) r = -kPi;
  return r;
}

BoundingBox3D::BoundingBox3D(const Vec3& center, const BoxSize& size, double yaw)
    : center_(center), size_(size), yaw_(normalize_angle(yaw)) {
  if (!center.allFinite()) fail(ErrorCode::InvalidArgument, "box center must be finite");
  if (!(size.length > 0.0 && size.width > 0.0 && size.height > 0.0) || !std::isfinite(size.length) ||
      !std::isfinite(size.width) || !std::isfinite(size.height)) {
    std::ostringstream msg;
    msg << "box sizes must be positive and finite, got (" << size.length << ", " << size.width << ", "
        << size.height << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
}

bool BoundingBox3D::contains(const Vec3& p) const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  const Vec3 d = p - center_;
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= 0.5 * size_.length && std::abs(ly) <= 0.5 * size_.width &&
         std::abs(d.z()) <= 0.5 * size_.height;
}

std::vector<std::size_t> points_in_box(const BoundingBox3D& box, const PointCloud& pc) {
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (box.contains(pc[i].position())) inside.push_back(i);
  }
  return inside;
}

double box_max_dimension(const BoundingBox3D& box) {
  const auto& s = box.size();
  return std::max({s.length, s.width, s.height});
}

BoundingBox3D transform_box(const RigidTransform& t, const BoundingBox3D& box) {
  return {t.apply(box.center()), box.size(), box.yaw() + t.yaw()};
}

PointCloud select(const PointCloud& pc, std::span<const std::size_t> indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(pc[i]);
  return out;
}

}  // namespace xray
