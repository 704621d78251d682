#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "xray/sequence.hpp"
#include "xray/simulate/scene.hpp"

namespace xray {

/// Fraction of gt_full points with a completed point within `radius`.
double coverage(const PointCloud& completed, const PointCloud& gt_full, double radius);

/// Symmetric mean nearest-neighbor distance (non-squared):
/// 0.5 * (mean_a d(a, B) + mean_b d(b, A)).
double chamfer(const PointCloud& a, const PointCloud& b);

struct TrackingScore {
  double precision = 1.0;
  double recall = 1.0;
};

/// Scores adjacent-frame links (frame i -> i+1). A predicted link is correct
/// when both endpoints carry the same ground-truth identity. Empty
/// denominators score 1.0.
TrackingScore tracking_score(const Sequence& seq, std::span<const Track> predicted, std::span<const Track> truth);

struct TransformError {
  double rotation_deg = 0.0;
  double translation_m = 0.0;
};

/// Geodesic angle and translation norm of estimated * truth^-1.
TransformError transform_error(const RigidTransform& estimated, const RigidTransform& truth);

struct ObjectEval {
  std::int64_t instance_id = 0;
  std::vector<double> frame_coverage;        ///< per frame
  std::vector<std::optional<double>> frame_chamfer;  ///< empty when no points fell in the box
  double coverage_min = 0.0;
  double coverage_mean = 0.0;
  double coverage_max = 0.0;
  std::optional<double> chamfer_mean;
};

struct EvalReport {
  double coverage_radius = 0.0;
  std::vector<ObjectEval> objects;
  std::optional<TrackingScore> tracking;
  std::optional<TransformError> registration;
};

/// Canonical in-box cloud of one object in one frame, using the true box.
PointCloud object_points(const Frame& frame, const BoundingBox3D& global_box);

/// Per-object completeness of every frame of `seq` against simulator truth.
EvalReport evaluate_sequence(const Sequence& seq, const GroundTruth& truth, double coverage_radius,
                             std::optional<std::span<const Track>> predicted_tracks = std::nullopt);

}  // namespace xray
