#include "xray/sequence.hpp"

#include <string>

#include "xray/core/error.hpp"

namespace xray {

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Vehicle: return "vehicle";
    case ObjectClass::Pedestrian: return "pedestrian";
    case ObjectClass::Cyclist: return "cyclist";
  }
  return "vehicle";
}

ObjectClass parse_object_class(std::string_view name) {
  if (name == "vehicle") return ObjectClass::Vehicle;
  if (name == "pedestrian") return ObjectClass::Pedestrian;
  if (name == "cyclist") return ObjectClass::Cyclist;
  fail(ErrorCode::Format, "unknown object class '" + std::string(name) + "'");
}

EgoPose EgoPose::from_yaw(double yaw, const Vec3& t) {
  EgoPose p;
  p.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  p.translation = t;
  return p;
}

void validate_sequence(const Sequence& seq) {
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    if (f.index != static_cast<std::int64_t>(i)) {
      fail(ErrorCode::InvalidArgument,
           "frame " + std::to_string(i) + " carries index " + std::to_string(f.index) + "; expected consecutive from 0");
    }
    if (i > 0 && f.timestamp_us <= seq.frames[i - 1].timestamp_us) {
      fail(ErrorCode::InvalidArgument, "frame " + std::to_string(i) + " timestamp is not strictly increasing");
    }
  }
}

BoundingBox3D global_box(const Frame& frame, std::size_t instance_index) {
  return transform_box(frame.ego_pose.transform(), frame.instances.at(instance_index).box);
}

}  // namespace xray
