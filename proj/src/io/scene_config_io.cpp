#include <cmath>
#include <string>

#include "detail.hpp"
#include "xray/io/sequence_io.hpp"

namespace xray::io {

using detail::FieldReader;
using detail::json;

namespace {

/// Accepts an explicit per-frame list of {"center": [...], "yaw": y} or one of
/// the parametric forms.
std::vector<ObjectPose> read_trajectory(const FieldReader& r, const json& v, const std::string& where,
                                        std::size_t n_frames, double frame_period_s, bool allow_orbit) {
  std::vector<ObjectPose> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      ObjectPose p;
      p.center = r.vec3(r.at(v[i], "center", w), w + ".center");
      if (const auto* y = r.find(v[i], "yaw", w)) p.yaw = r.number(*y, w + ".yaw");
      out.push_back(p);
    }
    return out;
  }
  if (const auto* s = r.find(v, "static", where)) {
    const std::string w = where + ".static";
    ObjectPose p;
    p.center = r.vec3(r.at(*s, "center", w), w + ".center");
    if (const auto* y = r.find(*s, "yaw", w)) p.yaw = r.number(*y, w + ".yaw");
    out.assign(n_frames, p);
    return out;
  }
  if (const auto* l = r.find(v, "linear", where)) {
    const std::string w = where + ".linear";
    const Vec3 start = r.vec3(r.at(*l, "start", w), w + ".start");
    const Vec3 vel = r.vec3(r.at(*l, "velocity", w), w + ".velocity");
    double yaw = std::atan2(vel.y(), vel.x());
    if (const auto* y = r.find(*l, "yaw", w)) yaw = r.number(*y, w + ".yaw");
    for (std::size_t f = 0; f < n_frames; ++f) {
      out.push_back({start + vel * (static_cast<double>(f) * frame_period_s), yaw});
    }
    return out;
  }
  if (const auto* o = allow_orbit ? r.find(v, "orbit", where) : nullptr) {
    const std::string w = where + ".orbit";
    const Vec3 center = r.vec3(r.at(*o, "center", w), w + ".center");
    const double radius = r.number(r.at(*o, "radius", w), w + ".radius");
    const double height = r.number(r.at(*o, "height", w), w + ".height");
    double start = 0.0;
    if (const auto* a = r.find(*o, "start_angle", w)) start = r.number(*a, w + ".start_angle");
    for (std::size_t f = 0; f < n_frames; ++f) {
      const double theta = start + 2.0 * kPi * static_cast<double>(f) / static_cast<double>(n_frames);
      out.push_back({Vec3(center.x() + radius * std::cos(theta), center.y() + radius * std::sin(theta), height),
                     theta + kPi});
    }
    return out;
  }
  r.malformed(where, allow_orbit ? "expected a pose list or one of static/linear/orbit"
                                 : "expected a pose list or one of static/linear");
}

}  // namespace

SceneConfig parse_scene_config(const std::string& json_text) {
  const FieldReader r("scene config");
  const json doc = detail::parse_json(json_text, "scene config");
  SceneConfig cfg;
  auto opt_number = [&](const char* key, double& dst) {
    if (const auto* v = r.find(doc, key, "$")) dst = r.number(*v, std::string("$.") + key);
  };
  if (const auto* v = r.find(doc, "name", "$")) cfg.name = r.string(*v, "$.name");
  const auto n = r.integer(r.at(doc, "n_frames", "$"), "$.n_frames");
  if (n < 1) r.malformed("$.n_frames", "must be >= 1");
  cfg.n_frames = static_cast<std::size_t>(n);
  if (const auto* v = r.find(doc, "seed", "$")) cfg.seed = r.unsigned_integer(*v, "$.seed");
  opt_number("points_per_m2", cfg.points_per_m2);
  opt_number("lidar_range", cfg.lidar_range);
  opt_number("noise_sigma", cfg.noise_sigma);
  if (const auto* v = r.find(doc, "frame_period_us", "$")) cfg.frame_period_us = r.integer(*v, "$.frame_period_us");
  if (const auto* v = r.find(doc, "start_timestamp_us", "$")) {
    cfg.start_timestamp_us = r.integer(*v, "$.start_timestamp_us");
  }
  if (const auto* g = r.find(doc, "ground", "$")) {
    cfg.ground_half_extent = r.number(r.at(*g, "half_extent", "$.ground"), "$.ground.half_extent");
    if (const auto* z = r.find(*g, "z", "$.ground")) cfg.ground_z = r.number(*z, "$.ground.z");
    if (const auto* d = r.find(*g, "points_per_m2", "$.ground")) {
      cfg.ground_points_per_m2 = r.number(*d, "$.ground.points_per_m2");
    }
  }
  if (cfg.frame_period_us <= 0) r.malformed("$.frame_period_us", "must be > 0");
  const double period_s = static_cast<double>(cfg.frame_period_us) * 1e-6;

  cfg.ego_trajectory = read_trajectory(r, r.at(doc, "ego_trajectory", "$"), "$.ego_trajectory", cfg.n_frames,
                                       period_s, true);
  const auto& objects = r.array(r.at(doc, "objects", "$"), "$.objects");
  for (std::size_t o = 0; o < objects.size(); ++o) {
    const auto& jo = objects[o];
    const std::string w = "$.objects[" + std::to_string(o) + "]";
    SceneObject obj;
    obj.instance_id = static_cast<std::int64_t>(o);
    try {
      if (const auto* s = r.find(jo, "shape", w)) obj.shape = parse_shape_kind(r.string(*s, w + ".shape"));
      if (const auto* c = r.find(jo, "class", w)) obj.label = parse_object_class(r.string(*c, w + ".class"));
    } catch (const Error& e) {
      r.malformed(w, e.what());
    }
    const Vec3 size = r.vec3(r.at(jo, "size", w), w + ".size");
    obj.size = {size.x(), size.y(), size.z()};
    if (const auto* id = r.find(jo, "instance_id", w)) obj.instance_id = r.integer(*id, w + ".instance_id");
    if (const auto* b = r.find(jo, "bottom_face", w)) obj.bottom_face = r.boolean(*b, w + ".bottom_face");
    obj.trajectory = read_trajectory(r, r.at(jo, "trajectory", w), w + ".trajectory", cfg.n_frames, period_s, false);
    cfg.objects.push_back(std::move(obj));
  }
  validate(cfg);
  return cfg;
}

SceneConfig read_scene_config(const std::filesystem::path& file) {
  try {
    return parse_scene_config(detail::read_file(file));
  } catch (const Error& e) {
    rethrow_with_context(e, file.string());
  }
}

}  // namespace xray::io
