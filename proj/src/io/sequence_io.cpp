#include "xray/io/sequence_io.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "detail.hpp"

namespace xray::io {

namespace fs = std::filesystem;
using detail::FieldReader;
using detail::json;
using detail::ordered_json;

namespace {

std::string numbered(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu%s", stem, i, ext);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::Io, "cannot create directory " + dir.string());
}

fs::path resolve_relative(const FieldReader& r, const fs::path& base, const std::string& rel, const std::string& where) {
  const fs::path p(rel);
  if (rel.empty() || p.is_absolute()) r.malformed(where, "must be a path relative to the directory");
  const fs::path full = base / p;
  if (!fs::is_regular_file(full)) fail(ErrorCode::Io, where + ": dangling path " + full.string());
  return full;
}

ordered_json tracks_to_json(std::span<const Track> tracks) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : tracks) {
    ordered_json occ = ordered_json::array();
    for (const auto& o : t.occurrences) occ.push_back({o.frame_index, o.instance_index});
    ordered_json jt;
    jt["track_id"] = t.track_id;
    jt["occurrences"] = std::move(occ);
    arr.push_back(std::move(jt));
  }
  return arr;
}

std::vector<Track> tracks_from_json(const FieldReader& r, const json& arr, const std::string& where) {
  std::vector<Track> tracks;
  r.array(arr, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    Track t;
    t.track_id = r.integer(r.at(arr[i], "track_id", w), w + ".track_id");
    const auto& occ = r.array(r.at(arr[i], "occurrences", w), w + ".occurrences");
    for (std::size_t k = 0; k < occ.size(); ++k) {
      const std::string wo = w + ".occurrences[" + std::to_string(k) + "]";
      if (!occ[k].is_array() || occ[k].size() != 2) r.malformed(wo, "expected [frame_index, instance_index]");
      t.occurrences.push_back({static_cast<std::size_t>(r.unsigned_integer(occ[k][0], wo + "[0]")),
                               static_cast<std::size_t>(r.unsigned_integer(occ[k][1], wo + "[1]"))});
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

void check_version(const FieldReader& r, const json& doc) {
  const auto v = r.integer(r.at(doc, "format_version", "$"), "$.format_version");
  if (v != kFormatVersion) r.malformed("$.format_version", "unsupported version " + std::to_string(v));
}

}  // namespace

PointCloud read_point_blob(const fs::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() % 16 != 0) {
    fail(ErrorCode::Format, path.string() + ": blob size " + std::to_string(bytes.size()) + " is not a multiple of 16");
  }
  PointCloud pc;
  pc.points.reserve(bytes.size() / 16);
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    const char* p = bytes.data() + off;
    const Point3 pt{detail::get_f32(p), detail::get_f32(p + 4), detail::get_f32(p + 8), detail::get_f32(p + 12)};
    if (!is_valid(pt)) {
      fail(ErrorCode::Format, path.string() + ": point " + std::to_string(off / 16) +
                                  " has non-finite coordinates or intensity outside [0,1]");
    }
    pc.points.push_back(pt);
  }
  return pc;
}

void write_point_blob(const fs::path& path, const PointCloud& cloud) {
  std::string bytes;
  bytes.reserve(cloud.size() * 16);
  for (const auto& p : cloud) {
    detail::put_f32(bytes, static_cast<float>(p.x));
    detail::put_f32(bytes, static_cast<float>(p.y));
    detail::put_f32(bytes, static_cast<float>(p.z));
    detail::put_f32(bytes, static_cast<float>(p.intensity));
  }
  detail::write_file(path, bytes);
}

Sequence read_sequence(const fs::path& dir) {
  const fs::path manifest = dir / kManifestName;
  if (!fs::is_regular_file(manifest)) fail(ErrorCode::Io, "no manifest at " + manifest.string());
  const FieldReader r("manifest " + manifest.string());
  const json doc = detail::parse_json(detail::read_file(manifest), "manifest " + manifest.string());
  check_version(r, doc);

  Sequence seq;
  seq.name = r.string(r.at(doc, "name", "$"), "$.name");
  const auto& frames = r.array(r.at(doc, "frames", "$"), "$.frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& jf = frames[i];
    const std::string w = "$.frames[" + std::to_string(i) + "]";
    Frame f;
    f.index = r.integer(r.at(jf, "index", w), w + ".index");
    if (f.index != static_cast<std::int64_t>(i)) r.malformed(w + ".index", "frame indices must be consecutive from 0");
    f.timestamp_us = r.integer(r.at(jf, "timestamp_us", w), w + ".timestamp_us");

    const auto& pose = r.at(jf, "ego_pose", w);
    const auto& q = r.at(pose, "quaternion", w + ".ego_pose");
    if (!q.is_array() || q.size() != 4) r.malformed(w + ".ego_pose.quaternion", "expected [w, x, y, z]");
    const std::string wq = w + ".ego_pose.quaternion";
    f.ego_pose.rotation = Eigen::Quaterniond(r.number(q[0], wq), r.number(q[1], wq), r.number(q[2], wq),
                                             r.number(q[3], wq));
    if (std::abs(f.ego_pose.rotation.norm() - 1.0) > 1e-6) r.malformed(wq, "quaternion is not unit-norm within 1e-6");
    f.ego_pose.translation = r.vec3(r.at(pose, "translation", w + ".ego_pose"), w + ".ego_pose.translation");

    const std::string points_file = r.string(r.at(jf, "points_file", w), w + ".points_file");
    f.cloud = read_point_blob(resolve_relative(r, dir, points_file, w + ".points_file"));
    if (const auto* n = r.find(jf, "original_point_count", w)) {
      f.original_point_count = static_cast<std::size_t>(r.unsigned_integer(*n, w + ".original_point_count"));
      if (*f.original_point_count > f.cloud.size()) {
        r.malformed(w + ".original_point_count", "exceeds the frame's point count");
      }
    }

    const auto& instances = r.array(r.at(jf, "instances", w), w + ".instances");
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto& ji = instances[k];
      const std::string wi = w + ".instances[" + std::to_string(k) + "]";
      DetectedInstance inst{detail::box_from_json(r, r.at(ji, "box", wi), wi + ".box"), ObjectClass::Vehicle, {}, {}};
      try {
        inst.label = parse_object_class(r.string(r.at(ji, "class", wi), wi + ".class"));
      } catch (const Error& e) {
        r.malformed(wi + ".class", e.what());
      }
      if (const auto* id = r.find(ji, "instance_id", wi)) inst.instance_id = r.integer(*id, wi + ".instance_id");
      if (const auto* s = r.find(ji, "score", wi)) {
        const double score = r.number(*s, wi + ".score");
        if (!(score >= 0.0 && score <= 1.0)) r.malformed(wi + ".score", "must lie in [0, 1]");
        inst.score = score;
      }
      f.instances.push_back(std::move(inst));
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void write_sequence(const Sequence& seq, const fs::path& dir) {
  ensure_dir(dir);
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = seq.name;
  ordered_json frames = ordered_json::array();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const Frame& f = seq.frames[i];
    if (f.index != static_cast<std::int64_t>(i)) {
      fail(ErrorCode::InvalidArgument, "frame " + std::to_string(i) + " has index " + std::to_string(f.index));
    }
    const std::string blob = numbered("frame", i, ".bin");
    write_point_blob(dir / blob, f.cloud);
    ordered_json jf;
    jf["index"] = f.index;
    jf["timestamp_us"] = f.timestamp_us;
    const auto& q = f.ego_pose.rotation;
    jf["ego_pose"] = {{"quaternion", {q.w(), q.x(), q.y(), q.z()}},
                      {"translation", {f.ego_pose.translation.x(), f.ego_pose.translation.y(), f.ego_pose.translation.z()}}};
    jf["points_file"] = blob;
    if (f.original_point_count) jf["original_point_count"] = *f.original_point_count;
    ordered_json instances = ordered_json::array();
    for (const auto& inst : f.instances) {
      ordered_json ji;
      if (inst.instance_id) ji["instance_id"] = *inst.instance_id;
      ji["class"] = std::string(to_string(inst.label));
      if (inst.score) ji["score"] = *inst.score;
      ji["box"] = detail::box_to_json(inst.box);
      instances.push_back(std::move(ji));
    }
    jf["instances"] = std::move(instances);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);
  detail::write_file(dir / kManifestName, doc.dump(2) + "\n");
}

std::vector<Track> read_tracks(const fs::path& file) {
  const FieldReader r("tracks file " + file.string());
  const json doc = detail::parse_json(detail::read_file(file), "tracks file " + file.string());
  check_version(r, doc);
  return tracks_from_json(r, r.at(doc, "tracks", "$"), "$.tracks");
}

void write_tracks(const fs::path& file, std::span<const Track> tracks) {
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["tracks"] = tracks_to_json(tracks);
  detail::write_file(file, doc.dump(2) + "\n");
}

GroundTruth read_ground_truth(const fs::path& dir) {
  const fs::path file = dir / kGroundTruthName;
  if (!fs::is_regular_file(file)) fail(ErrorCode::Io, "no ground truth at " + file.string());
  const FieldReader r("ground truth " + file.string());
  const json doc = detail::parse_json(detail::read_file(file), "ground truth " + file.string());
  check_version(r, doc);
  GroundTruth gt;
  const auto& objects = r.array(r.at(doc, "objects", "$"), "$.objects");
  for (std::size_t o = 0; o < objects.size(); ++o) {
    const std::string w = "$.objects[" + std::to_string(o) + "]";
    gt.instance_ids.push_back(r.integer(r.at(objects[o], "instance_id", w), w + ".instance_id"));
    const auto rel = r.string(r.at(objects[o], "surface_file", w), w + ".surface_file");
    gt.full_surfaces.push_back(read_point_blob(resolve_relative(r, dir, rel, w + ".surface_file")));
    if (gt.full_surfaces.back().empty()) r.malformed(w + ".surface_file", "ground-truth surface is empty");
  }
  gt.tracks = tracks_from_json(r, r.at(doc, "tracks", "$"), "$.tracks");
  const auto& boxes = r.array(r.at(doc, "global_boxes", "$"), "$.global_boxes");
  for (std::size_t f = 0; f < boxes.size(); ++f) {
    const std::string w = "$.global_boxes[" + std::to_string(f) + "]";
    auto& row = gt.global_boxes.emplace_back();
    for (std::size_t o = 0; o < r.array(boxes[f], w).size(); ++o) {
      row.push_back(detail::box_from_json(r, boxes[f][o], w + "[" + std::to_string(o) + "]"));
    }
    if (row.size() != objects.size()) r.malformed(w, "expected one box per object");
  }
  return gt;
}

void write_ground_truth(const GroundTruth& truth, const fs::path& dir) {
  ensure_dir(dir);
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  ordered_json objects = ordered_json::array();
  for (std::size_t o = 0; o < truth.full_surfaces.size(); ++o) {
    const std::string blob = numbered("gt_surface", o, ".bin");
    write_point_blob(dir / blob, truth.full_surfaces[o]);
    objects.push_back({{"instance_id", truth.instance_ids.at(o)}, {"surface_file", blob}});
  }
  doc["objects"] = std::move(objects);
  doc["tracks"] = tracks_to_json(truth.tracks);
  ordered_json boxes = ordered_json::array();
  for (const auto& row : truth.global_boxes) {
    ordered_json jr = ordered_json::array();
    for (const auto& b : row) jr.push_back(detail::box_to_json(b));
    boxes.push_back(std::move(jr));
  }
  doc["global_boxes"] = std::move(boxes);
  detail::write_file(dir / kGroundTruthName, doc.dump(2) + "\n");
}

}  // namespace xray::io
