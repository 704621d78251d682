#include "xray/registration/icp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "xray/core/error.hpp"
#include "xray/registration/voxel_grid.hpp"

namespace xray {

namespace {

Vec3 mean_of(std::span<const Vec3> pts) {
  Vec3 m = Vec3::Zero();
  for (const auto& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

bool collinear(std::span<const Vec3> pts, const Vec3& mean) {
  if (pts.size() < 3) return true;
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::JacobiSVD<Mat3> svd(cov);
  const auto& s = svd.singularValues();
  return s(1) <= 1e-12 * std::max(s(0), 1e-300);
}

}  // namespace

RigidTransform fit_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size() || src.empty()) {
    fail(ErrorCode::InvalidArgument, "rigid fit needs equally sized, nonempty point sets");
  }
  const Vec3 ms = mean_of(src);
  const Vec3 md = mean_of(dst);
  if (collinear(src, ms)) return RigidTransform::translation_only(md - ms);

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - ms) * (dst[i] - md).transpose();
  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = v * d * u.transpose();
  return {r, md - r * ms};
}

RegistrationResult icp_register(const PointCloud& source, const PointCloud& target, const IcpParams& params) {
  if (source.empty() || target.empty()) fail(ErrorCode::InvalidArgument, "icp needs nonempty source and target");
  if (params.max_iterations < 0 || !(params.max_correspondence_dist > 0.0) || params.convergence_tol < 0.0) {
    fail(ErrorCode::InvalidArgument, "invalid icp parameters");
  }

  const VoxelGrid grid(target, params.max_correspondence_dist);
  std::vector<Vec3> src;
  src.reserve(source.size());
  for (const auto& p : source) src.push_back(p.position());

  std::vector<Vec3> moved(src.size());
  std::vector<Vec3> matched_src;
  std::vector<Vec3> matched_dst;

  // Builds correspondences for `t` and returns the truncated RMSE: every
  // source point contributes min(d, max_correspondence_dist)^2. A rigid fit
  // followed by re-matching cannot raise this, unlike the inlier-only RMSE
  // whose inlier set grows as the alignment improves.
  const double cap_sq = params.max_correspondence_dist * params.max_correspondence_dist;
  double inlier_rmse = 0.0;
  auto evaluate = [&](const RigidTransform& t, int iteration) {
    matched_src.clear();
    matched_dst.clear();
    double sq = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      moved[i] = t.apply(src[i]);
      if (auto nn = grid.nearest_within(moved[i], params.max_correspondence_dist)) {
        matched_src.push_back(moved[i]);
        matched_dst.push_back(target[nn->index].position());
        sq += nn->distance * nn->distance;
      }
    }
    if (matched_src.empty()) {
      fail(ErrorCode::NoOverlap, "no overlap: zero correspondences at icp iteration " + std::to_string(iteration));
    }
    inlier_rmse = std::sqrt(sq / static_cast<double>(matched_src.size()));
    const double outliers = static_cast<double>(src.size() - matched_src.size());
    return std::sqrt((sq + outliers * cap_sq) / static_cast<double>(src.size()));
  };

  RegistrationResult result;
  RigidTransform current;
  double rmse = evaluate(current, 0);
  double accepted_inlier_rmse = inlier_rmse;
  result.rmse_trace.push_back(rmse);

  while (result.iterations < params.max_iterations && rmse > 0.0) {
    const RigidTransform candidate = compose(fit_rigid(matched_src, matched_dst), current);
    const double next = evaluate(candidate, result.iterations + 1);
    if (next > rmse) break;  // rounding only; `current` keeps the last accepted pose
    current = candidate;
    accepted_inlier_rmse = inlier_rmse;
    ++result.iterations;
    const double improvement = rmse - next;
    rmse = next;
    result.rmse_trace.push_back(rmse);
    if (improvement < params.convergence_tol) break;
  }

  result.transform = current;
  result.residual_rmse = accepted_inlier_rmse;
  return result;
}

}  // namespace xray
