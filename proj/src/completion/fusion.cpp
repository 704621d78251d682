#include "xray/completion/fusion.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "xray/core/error.hpp"
#include "xray/core/parallel.hpp"
#include "xray/tracking/tracker.hpp"

namespace xray {

namespace {

constexpr std::uint64_t kSubsampleStream = 0x73756273616d70ULL;

struct Slot {
  std::size_t track = 0;
  std::size_t view = 0;
};

}  // namespace

std::size_t subsample_budget(std::size_t original_count, std::size_t available, double factor) {
  if (std::isnan(factor) || factor < 0.0) fail(ErrorCode::InvalidArgument, "subsample factor must be >= 0");
  if (std::isinf(factor)) return available;
  const double budget = std::floor(factor * static_cast<double>(original_count));
  if (budget >= static_cast<double>(available)) return available;
  return static_cast<std::size_t>(budget);
}

PointCloud subsample_added_points(std::size_t original_count, const PointCloud& new_points, double factor, Rng& rng) {
  const std::size_t n = new_points.size();
  std::size_t need = subsample_budget(original_count, n, factor);
  if (need == n) return new_points;
  PointCloud kept;
  kept.points.reserve(need);
  // Selection sampling: each subset of size `need` is equally likely.
  for (std::size_t i = 0; i < n && need > 0; ++i) {
    if (static_cast<double>(n - i) * rng.uniform() < static_cast<double>(need)) {
      kept.points.push_back(new_points[i]);
      --need;
    }
  }
  return kept;
}

FusionResult fuse_sequence(const Sequence& seq, std::span<const Track> tracks, const FusionConfig& cfg) {
  subsample_budget(0, 0, cfg.subsample_factor);  // validates the factor

  std::map<std::pair<std::size_t, std::size_t>, Slot> owner;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const auto& occ = tracks[t].occurrences;
    if (occ.empty()) fail(ErrorCode::InvalidArgument, "track " + std::to_string(tracks[t].track_id) + " is empty");
    for (std::size_t v = 0; v < occ.size(); ++v) {
      const auto [f, k] = occ[v];
      const std::string where = "track " + std::to_string(tracks[t].track_id) + " references frame " +
                                std::to_string(f) + " instance " + std::to_string(k);
      if (f >= seq.frames.size() || k >= seq.frames[f].instances.size()) {
        fail(ErrorCode::InvalidArgument, where + ", which does not exist");
      }
      if (!owner.emplace(std::pair{f, k}, Slot{t, v}).second) {
        fail(ErrorCode::InvalidArgument, where + ", which already belongs to another track");
      }
    }
  }

  std::vector<MergeResult> merged(tracks.size());
  parallel_for(tracks.size(), [&](std::size_t t) {
    std::vector<TrackView> views;
    views.reserve(tracks[t].occurrences.size());
    for (const auto [f, k] : tracks[t].occurrences) {
      const auto& frame = seq.frames[f];
      const auto& box = frame.instances[k].box;
      views.push_back({select(frame.cloud, points_in_box(box, frame.cloud)), box});
    }
    try {
      merged[t] = merge_track(views, cfg.strategy, cfg.icp, tracks[t].track_id);
    } catch (const Error& e) {
      rethrow_with_context(e, "track " + std::to_string(tracks[t].track_id));
    }
  });

  FusionResult result;
  result.sequence.name = seq.name;
  result.sequence.frames.resize(seq.frames.size());
  result.report.frames.resize(seq.frames.size());

  parallel_for(seq.frames.size(), [&](std::size_t f) {
    const Frame& in = seq.frames[f];
    Frame& out = result.sequence.frames[f];
    auto& stats = result.report.frames[f];
    stats.frame_index = f;
    stats.original_count = in.cloud.size();
    out = in;
    if (in.instances.empty()) return;

    PointCloud candidates;
    for (std::size_t k = 0; k < in.instances.size(); ++k) {
      const auto it = owner.find({f, k});
      if (it == owner.end()) continue;
      const MergeResult& m = merged[it->second.track];
      const std::size_t own = it->second.view;
      // Everything except this frame's own view is new to the frame.
      PointCloud others;
      const auto& pts = m.object.cloud.points;
      others.points.reserve(pts.size() - (m.view_offsets[own + 1] - m.view_offsets[own]));
      others.points.insert(others.points.end(), pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(m.view_offsets[own]));
      others.points.insert(others.points.end(), pts.begin() + static_cast<std::ptrdiff_t>(m.view_offsets[own + 1]), pts.end());
      candidates.append(repose(others, in.instances[k].box));
    }
    Rng rng(cfg.seed, kSubsampleStream, f);
    const PointCloud added = subsample_added_points(in.cloud.size(), candidates, cfg.subsample_factor, rng);
    stats.candidate_count = candidates.size();
    stats.added_count = added.size();
    out.original_point_count = in.cloud.size();
    out.cloud.append(added);
  });

  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const auto& m = merged[t];
    result.report.tracks.push_back({tracks[t].track_id, m.object.source_count, m.object.cloud.size(),
                                    m.view_residuals, m.fallback_count});
  }
  for (const auto& s : result.report.frames) {
    result.report.total_candidates += s.candidate_count;
    result.report.total_added += s.added_count;
  }
  return result;
}

std::string_view to_string(TrackingMode m) { return m == TrackingMode::Greedy ? "greedy" : "ids"; }

TrackingMode parse_tracking_mode(std::string_view name) {
  if (name == "greedy") return TrackingMode::Greedy;
  if (name == "ids" || name == "instance_ids") return TrackingMode::InstanceIds;
  fail(ErrorCode::InvalidArgument, "unknown tracking mode '" + std::string(name) + "'");
}

PipelineResult run_pipeline(const Sequence& seq, const FusionConfig& cfg, TrackingMode mode) {
  PipelineResult out;
  try {
    validate_sequence(seq);
    out.tracks = mode == TrackingMode::Greedy ? greedy_track(seq) : track_instances_from_ids(seq);
  } catch (const Error& e) {
    rethrow_with_context(e, std::string("tracking (") + std::string(to_string(mode)) + ")");
  }
  auto fused = fuse_sequence(seq, out.tracks, cfg);
  out.sequence = std::move(fused.sequence);
  out.report = std::move(fused.report);
  return out;
}

}  // namespace xray
