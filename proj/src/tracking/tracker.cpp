#include "xray/tracking/tracker.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "xray/core/error.hpp"

namespace xray {

double association_radius(const BoundingBox3D& a, const BoundingBox3D& b) {
  return 2.0 * std::max(box_max_dimension(a), box_max_dimension(b));
}

std::vector<Track> greedy_associate(const std::vector<std::vector<TrackingCandidate>>& frames) {
  std::vector<Track> tracks;
  // tail_of[k] = index into `tracks` of the track ending at instance k of the current frame.
  std::vector<std::size_t> tail_of;

  auto open_track = [&tracks](std::size_t frame, std::size_t inst) {
    Track t;
    t.track_id = static_cast<std::int64_t>(tracks.size());
    t.occurrences.push_back({frame, inst});
    tracks.push_back(std::move(t));
    return tracks.size() - 1;
  };

  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& current = frames[f];
    if (f == 0) {
      tail_of.clear();
      for (std::size_t k = 0; k < current.size(); ++k) tail_of.push_back(open_track(f, k));
      continue;
    }
    const auto& previous = frames[f - 1];
    std::vector<bool> claimed(current.size(), false);
    std::vector<std::size_t> next_tail(current.size(), std::numeric_limits<std::size_t>::max());

    for (std::size_t j = 0; j < previous.size(); ++j) {
      const auto& from = previous[j];
      std::size_t best = current.size();
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < current.size(); ++k) {
        if (claimed[k] || current[k].label != from.label) continue;
        const double d = (current[k].box.center() - from.box.center()).norm();
        if (d > association_radius(from.box, current[k].box)) continue;
        if (d < best_dist) {  // strict: the lower index wins ties
          best_dist = d;
          best = k;
        }
      }
      if (best == current.size()) continue;  // track terminates
      claimed[best] = true;
      tracks[tail_of[j]].occurrences.push_back({f, best});
      next_tail[best] = tail_of[j];
    }
    for (std::size_t k = 0; k < current.size(); ++k) {
      if (!claimed[k]) next_tail[k] = open_track(f, k);
    }
    tail_of = std::move(next_tail);
  }
  return tracks;
}

std::vector<Track> greedy_track(const Sequence& seq) {
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    if (seq.frames[i].timestamp_us <= seq.frames[i - 1].timestamp_us) {
      fail(ErrorCode::InvalidArgument,
           "frame " + std::to_string(i) + ": timestamps must be strictly increasing for tracking");
    }
  }
  std::vector<std::vector<TrackingCandidate>> lifted;
  lifted.reserve(seq.frames.size());
  for (const auto& frame : seq.frames) {
    const RigidTransform ego = frame.ego_pose.transform();
    auto& row = lifted.emplace_back();
    row.reserve(frame.instances.size());
    for (const auto& inst : frame.instances) row.push_back({transform_box(ego, inst.box), inst.label});
  }
  return greedy_associate(lifted);
}

std::vector<Track> track_instances_from_ids(const Sequence& seq) {
  std::vector<Track> tracks;
  std::map<std::int64_t, std::size_t> slot;
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    std::set<std::int64_t> seen;
    const auto& instances = seq.frames[f].instances;
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto& id = instances[k].instance_id;
      if (!id) {
        fail(ErrorCode::InvalidArgument,
             "frame " + std::to_string(f) + " instance " + std::to_string(k) + " has no instance_id");
      }
      if (!seen.insert(*id).second) {
        fail(ErrorCode::InvalidArgument,
             "frame " + std::to_string(f) + " repeats instance_id " + std::to_string(*id));
      }
      auto [it, inserted] = slot.try_emplace(*id, tracks.size());
      if (inserted) tracks.push_back(Track{*id, {}});
      tracks[it->second].occurrences.push_back({f, k});
    }
  }
  return tracks;
}

}  // namespace xray
