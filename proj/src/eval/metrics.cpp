#include "xray/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "xray/core/error.hpp"
#include "xray/core/parallel.hpp"
#include "xray/registration/merge.hpp"
#include "xray/registration/voxel_grid.hpp"

namespace xray {

namespace {

double mean_nearest(const PointCloud& from, const VoxelGrid& to) {
  double acc = 0.0;
  for (const auto& p : from) acc += to.nearest(p.position()).distance;
  return acc / static_cast<double>(from.size());
}

/// Cell size for unbounded nearest queries: a few points per cell on a
/// surface-like cloud keeps the searched shells short.
double chamfer_cell(const PointCloud& pc) {
  Vec3 lo = pc[0].position();
  Vec3 hi = lo;
  for (const auto& p : pc) {
    lo = lo.cwiseMin(p.position());
    hi = hi.cwiseMax(p.position());
  }
  const double diag = (hi - lo).norm();
  const double cell = 3.0 * diag / std::sqrt(static_cast<double>(pc.size()));
  return std::max(cell, 1e-3);
}

using LinkSet = std::set<std::pair<Occurrence, Occurrence>>;

LinkSet adjacent_links(std::span<const Track> tracks, const Sequence& seq, const char* who) {
  LinkSet links;
  for (const auto& t : tracks) {
    for (std::size_t i = 0; i < t.occurrences.size(); ++i) {
      const auto& o = t.occurrences[i];
      if (o.frame_index >= seq.frames.size() || o.instance_index >= seq.frames[o.frame_index].instances.size()) {
        fail(ErrorCode::InvalidArgument, std::string(who) + " track " + std::to_string(t.track_id) +
                                             " references an instance outside the sequence");
      }
      if (i > 0 && t.occurrences[i - 1].frame_index + 1 == o.frame_index) links.insert({t.occurrences[i - 1], o});
    }
  }
  return links;
}

}  // namespace

double coverage(const PointCloud& completed, const PointCloud& gt_full, double radius) {
  if (gt_full.empty()) fail(ErrorCode::InvalidArgument, "coverage needs a nonempty ground-truth cloud");
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "coverage radius must be > 0");
  if (completed.empty()) return 0.0;
  const VoxelGrid grid(completed, radius);
  std::size_t hit = 0;
  for (const auto& p : gt_full) hit += grid.any_within(p.position(), radius) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(gt_full.size());
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "chamfer needs nonempty clouds");
  const VoxelGrid grid_a(a, chamfer_cell(a));
  const VoxelGrid grid_b(b, chamfer_cell(b));
  return 0.5 * (mean_nearest(a, grid_b) + mean_nearest(b, grid_a));
}

TrackingScore tracking_score(const Sequence& seq, std::span<const Track> predicted, std::span<const Track> truth) {
  const LinkSet pred = adjacent_links(predicted, seq, "predicted");
  const LinkSet gt = adjacent_links(truth, seq, "ground-truth");
  std::map<Occurrence, std::int64_t> identity;
  for (const auto& t : truth) {
    for (const auto& o : t.occurrences) identity[o] = t.track_id;
  }
  std::size_t correct = 0;
  for (const auto& [a, b] : pred) {
    const auto ia = identity.find(a);
    const auto ib = identity.find(b);
    if (ia != identity.end() && ib != identity.end() && ia->second == ib->second) ++correct;
  }
  TrackingScore s;
  s.precision = pred.empty() ? 1.0 : static_cast<double>(correct) / static_cast<double>(pred.size());
  s.recall = gt.empty() ? 1.0 : static_cast<double>(correct) / static_cast<double>(gt.size());
  return s;
}

TransformError transform_error(const RigidTransform& estimated, const RigidTransform& truth) {
  const RigidTransform delta = compose(estimated, truth.inverse());
  // atan2 of the axis-vector norm and the trace stays accurate near zero,
  // where acos of the trace alone loses half the digits.
  const Mat3& r = delta.rotation();
  const Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double angle = std::atan2(0.5 * axis.norm(), 0.5 * (r.trace() - 1.0));
  return {angle * 180.0 / kPi, delta.translation().norm()};
}

PointCloud object_points(const Frame& frame, const BoundingBox3D& global_box) {
  const BoundingBox3D box = transform_box(frame.ego_pose.transform().inverse(), global_box);
  return canonicalize(select(frame.cloud, points_in_box(box, frame.cloud)), box);
}

EvalReport evaluate_sequence(const Sequence& seq, const GroundTruth& truth, double coverage_radius,
                             std::optional<std::span<const Track>> predicted_tracks) {
  if (truth.global_boxes.size() != seq.frames.size()) {
    fail(ErrorCode::InvalidArgument, "ground truth covers " + std::to_string(truth.global_boxes.size()) +
                                         " frames but the sequence has " + std::to_string(seq.frames.size()));
  }
  EvalReport report;
  report.coverage_radius = coverage_radius;
  const std::size_t n_obj = truth.full_surfaces.size();
  const std::size_t n_frames = seq.frames.size();
  report.objects.resize(n_obj);
  for (std::size_t o = 0; o < n_obj; ++o) {
    report.objects[o].instance_id = truth.instance_ids.at(o);
    report.objects[o].frame_coverage.assign(n_frames, 0.0);
    report.objects[o].frame_chamfer.assign(n_frames, std::nullopt);
  }
  parallel_for(n_frames * n_obj, [&](std::size_t job) {
    const std::size_t f = job / n_obj;
    const std::size_t o = job % n_obj;
    const PointCloud pts = object_points(seq.frames[f], truth.global_boxes[f].at(o));
    auto& obj = report.objects[o];
    obj.frame_coverage[f] = coverage(pts, truth.full_surfaces[o], coverage_radius);
    if (!pts.empty()) obj.frame_chamfer[f] = chamfer(pts, truth.full_surfaces[o]);
  });
  for (auto& obj : report.objects) {
    if (obj.frame_coverage.empty()) continue;
    obj.coverage_min = *std::min_element(obj.frame_coverage.begin(), obj.frame_coverage.end());
    obj.coverage_max = *std::max_element(obj.frame_coverage.begin(), obj.frame_coverage.end());
    double sum = 0.0;
    for (double c : obj.frame_coverage) sum += c;
    obj.coverage_mean = sum / static_cast<double>(obj.frame_coverage.size());
    double csum = 0.0;
    std::size_t cn = 0;
    for (const auto& c : obj.frame_chamfer) {
      if (c) {
        csum += *c;
        ++cn;
      }
    }
    if (cn > 0) obj.chamfer_mean = csum / static_cast<double>(cn);
  }
  if (predicted_tracks) report.tracking = tracking_score(seq, *predicted_tracks, truth.tracks);
  return report;
}

}  // namespace xray
