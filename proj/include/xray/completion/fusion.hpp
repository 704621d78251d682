#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xray/core/random.hpp"
#include "xray/registration/merge.hpp"
#include "xray/sequence.hpp"

namespace xray {

struct FusionConfig {
  MergeStrategy strategy = MergeStrategy::Geometry;
  /// Added points per frame are capped at floor(factor * original frame size).
  /// Infinity disables the cap.
  double subsample_factor = 1.5;
  std::uint64_t seed = 0;
  IcpParams icp;
};

struct TrackFusionStats {
  std::int64_t track_id = 0;
  std::size_t view_count = 0;
  std::size_t merged_point_count = 0;
  std::vector<std::optional<double>> icp_residuals;
  std::size_t fallback_count = 0;
};

struct FrameFusionStats {
  std::size_t frame_index = 0;
  std::size_t original_count = 0;
  std::size_t candidate_count = 0;  ///< points other views offered to this frame
  std::size_t added_count = 0;      ///< after subsampling
};

struct FusionReport {
  std::vector<TrackFusionStats> tracks;
  std::vector<FrameFusionStats> frames;
  std::size_t total_candidates = 0;
  std::size_t total_added = 0;
};

struct FusionResult {
  Sequence sequence;
  FusionReport report;
};

/// Number of new points kept: min(available, floor(factor * original_count)).
std::size_t subsample_budget(std::size_t original_count, std::size_t available, double factor);

/// Uniform selection without replacement of subsample_budget(...) points,
/// preserving their relative order.
PointCloud subsample_added_points(std::size_t original_count, const PointCloud& new_points, double factor, Rng& rng);

/// Builds Object-Complete frames. Every original point is kept in place; each
/// tracked instance receives the points its track's other views contributed,
/// re-posed into the instance box, and the frame's added points are then
/// subsampled against the frame's original size. Frames without instances are
/// returned unchanged. Output is independent of worker count.
FusionResult fuse_sequence(const Sequence& seq, std::span<const Track> tracks, const FusionConfig& cfg);

enum class TrackingMode { Greedy, InstanceIds };

std::string_view to_string(TrackingMode m);
TrackingMode parse_tracking_mode(std::string_view name);

struct PipelineResult {
  Sequence sequence;
  std::vector<Track> tracks;
  FusionReport report;
};

/// tracking -> per-track merge -> frame patching.
PipelineResult run_pipeline(const Sequence& seq, const FusionConfig& cfg, TrackingMode mode);

}  // namespace xray
