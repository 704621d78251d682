#pragma once

#include <span>
#include <vector>

#include "xray/core/geometry.hpp"

namespace xray {

struct IcpParams {
  int max_iterations = 50;
  double convergence_tol = 1e-4;         ///< meters of RMSE improvement
  double max_correspondence_dist = 0.5;  ///< meters; also the voxel cell size
};

struct RegistrationResult {
  RigidTransform transform;         ///< maps source into the target frame
  double residual_rmse = 0.0;       ///< over inlier correspondences, meters
  int iterations = 0;               ///< accepted rigid fits
  std::vector<double> rmse_trace;   ///< truncated RMSE after 0, 1, ... accepted fits
};

/// Least-squares rigid fit dst ~ R src + t (Kabsch via SVD). Falls back to a
/// translation-only fit when fewer than three points are given or the source
/// points are collinear.
RigidTransform fit_rigid(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Point-to-point ICP. Each iteration pairs every transformed source point
/// with its nearest target point within max_correspondence_dist, fits a rigid
/// correction and composes it. Progress is measured by the truncated RMSE, in
/// which unmatched source points count as max_correspondence_dist. Iteration
/// stops when its improvement drops below convergence_tol or after
/// max_iterations fits. rmse_trace is non-increasing; residual_rmse is the
/// inlier RMSE of the final pose.
///
/// Throws Error(InvalidArgument) on empty input and Error(NoOverlap) when an
/// iteration finds no correspondence.
RegistrationResult icp_register(const PointCloud& source, const PointCloud& target, const IcpParams& params = {});

}  // namespace xray
