#pragma once

#include <vector>

#include "xray/sequence.hpp"

namespace xray {

/// One detection as seen by the associator: its global-frame box and class.
struct TrackingCandidate {
  BoundingBox3D box;
  ObjectClass label;
};

/// Association radius for a pair of boxes: twice the largest dimension of either box.
double association_radius(const BoundingBox3D& a, const BoundingBox3D& b);

/// Greedy frame-to-frame association over pre-lifted global boxes.
///
/// Each track tail in frame i (visited in ascending instance index) claims the
/// nearest still-unclaimed same-class detection of frame i+1 whose center lies
/// within association_radius; ties go to the lower index. A tail with no
/// candidate terminates its track. Unclaimed detections open new tracks. Track
/// ids are assigned 0, 1, ... in order of creation.
std::vector<Track> greedy_associate(const std::vector<std::vector<TrackingCandidate>>& frames);

/// Lifts every instance box to the global frame and runs greedy_associate.
/// Rejects sequences whose timestamps are not strictly increasing.
std::vector<Track> greedy_track(const Sequence& seq);

/// One track per distinct instance_id (track_id = instance_id), ordered by
/// first appearance. Gaps are allowed. Rejects missing ids and duplicate ids
/// within one frame.
std::vector<Track> track_instances_from_ids(const Sequence& seq);

}  // namespace xray
