#include "xray/registration/merge.hpp"

#include <string>

#include "xray/core/error.hpp"

namespace xray {

std::string_view to_string(MergeStrategy s) { return s == MergeStrategy::Icp ? "icp" : "geometry"; }

MergeStrategy parse_merge_strategy(std::string_view name) {
  if (name == "geometry") return MergeStrategy::Geometry;
  if (name == "icp") return MergeStrategy::Icp;
  fail(ErrorCode::InvalidArgument, "unknown merge strategy '" + std::string(name) + "'");
}

PointCloud canonicalize(const PointCloud& instance_cloud, const BoundingBox3D& box) {
  return apply_transform(box.pose().inverse(), instance_cloud);
}

PointCloud repose(const PointCloud& canonical_cloud, const BoundingBox3D& box) {
  return apply_transform(box.pose(), canonical_cloud);
}

MergeResult merge_track(std::span<const TrackView> views, MergeStrategy strategy, const IcpParams& icp,
                        std::int64_t track_id) {
  if (views.empty()) fail(ErrorCode::InvalidArgument, "merge_track needs at least one view");

  MergeResult out;
  out.object.track_id = track_id;
  out.object.source_count = views.size();
  out.view_offsets.push_back(0);
  auto& merged = out.object.cloud;

  for (std::size_t k = 0; k < views.size(); ++k) {
    PointCloud view = canonicalize(views[k].cloud, views[k].box);
    std::optional<double> residual;
    if (strategy == MergeStrategy::Icp && k > 0) {
      try {
        const auto reg = icp_register(view, merged, icp);
        view = apply_transform(reg.transform, view);
        residual = reg.residual_rmse;
      } catch (const Error&) {
        // Empty view, empty accumulation or no overlap: keep the box alignment.
        ++out.fallback_count;
      }
    }
    merged.append(view);
    out.view_offsets.push_back(merged.size());
    out.view_residuals.push_back(residual);
  }
  return out;
}

}  // namespace xray
