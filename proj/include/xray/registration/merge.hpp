#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xray/core/geometry.hpp"
#include "xray/registration/icp.hpp"

namespace xray {

enum class MergeStrategy { Geometry, Icp };

std::string_view to_string(MergeStrategy s);
MergeStrategy parse_merge_strategy(std::string_view name);

/// Moves a cloud into its box's canonical frame: p -> R(-yaw) (p - center).
PointCloud canonicalize(const PointCloud& instance_cloud, const BoundingBox3D& box);

/// Inverse of canonicalize: places a canonical cloud at the box pose.
PointCloud repose(const PointCloud& canonical_cloud, const BoundingBox3D& box);

/// One observation of a tracked object; cloud and box share a frame.
struct TrackView {
  PointCloud cloud;
  BoundingBox3D box;
};

struct CanonicalObject {
  std::int64_t track_id = 0;
  PointCloud cloud;  ///< canonical frame of the first view's box
  std::size_t source_count = 0;
};

struct MergeResult {
  CanonicalObject object;
  /// View k contributed object.cloud points [view_offsets[k], view_offsets[k+1]).
  std::vector<std::size_t> view_offsets;
  /// ICP residual per view; empty for the seed and for uncorrected fallbacks.
  std::vector<std::optional<double>> view_residuals;
  std::size_t fallback_count = 0;
};

/// Fuses the views of one track in time order.
///
/// Geometry: canonicalize every view and concatenate. Icp: the first
/// canonicalized view seeds the accumulated cloud; each later view is
/// canonicalized, registered against the accumulated cloud, corrected and
/// appended. Views whose registration fails are appended uncorrected and
/// counted in fallback_count.
MergeResult merge_track(std::span<const TrackView> views, MergeStrategy strategy, const IcpParams& icp = {},
                        std::int64_t track_id = 0);

}  // namespace xray
