#include "xray/io/files.hpp"

#include <cmath>
#include <cstdio>

#include "detail.hpp"

namespace xray::io {

namespace fs = std::filesystem;
using detail::ordered_json;

namespace {

constexpr char kTensorMagic[4] = {'X', 'R', 'T', 'N'};

}  // namespace

Tensor read_tensor(const fs::path& path) {
  const std::string bytes = detail::read_file(path);
  const std::string where = "tensor file " + path.string();
  if (bytes.size() < 8 || bytes.compare(0, 4, kTensorMagic, 4) != 0) fail(ErrorCode::Format, where + ": missing XRTN magic");
  const std::uint32_t rank = detail::get_u32(bytes.data() + 4);
  if (bytes.size() < 8 + 4ull * rank) fail(ErrorCode::Format, where + ": truncated header");
  std::vector<std::size_t> shape;
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = detail::get_u32(bytes.data() + 8 + 4 * i);
    if (d == 0) fail(ErrorCode::Format, where + ": dimension " + std::to_string(i) + " is zero");
    shape.push_back(d);
    count *= d;
  }
  const std::size_t header = 8 + 4ull * rank;
  if (bytes.size() != header + 4 * count) {
    fail(ErrorCode::Format, where + ": payload holds " + std::to_string(bytes.size() - header) + " bytes, expected " +
                                std::to_string(4 * count));
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = detail::get_f32(bytes.data() + header + 4 * i);
    if (!std::isfinite(data[i])) fail(ErrorCode::Format, where + ": value " + std::to_string(i) + " is not finite");
  }
  return {std::move(shape), std::move(data)};
}

void write_tensor(const fs::path& path, const Tensor& tensor) {
  std::string bytes(kTensorMagic, 4);
  detail::put_u32(bytes, static_cast<std::uint32_t>(tensor.rank()));
  for (auto d : tensor.shape()) {
    if (d > 0xffffffffu) fail(ErrorCode::InvalidArgument, "tensor dimension exceeds u32");
    detail::put_u32(bytes, static_cast<std::uint32_t>(d));
  }
  for (double v : tensor.data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) fail(ErrorCode::InvalidArgument, "tensor value overflows float32");
    detail::put_f32(bytes, f);
  }
  detail::write_file(path, bytes);
}

void export_ply(const PointCloud& pc, const fs::path& path, Rgb color, std::optional<std::size_t> highlight_from,
                Rgb highlight) {
  std::string out;
  out.reserve(200 + pc.size() * 48);
  out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(pc.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  char line[160];
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Rgb c = highlight_from && i >= *highlight_from ? highlight : color;
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g %u %u %u\n", static_cast<double>(static_cast<float>(pc[i].x)),
                  static_cast<double>(static_cast<float>(pc[i].y)), static_cast<double>(static_cast<float>(pc[i].z)),
                  static_cast<unsigned>(c.r), static_cast<unsigned>(c.g), static_cast<unsigned>(c.b));
    out += line;
  }
  detail::write_file(path, out);
}

std::string to_json(const EvalReport& report) {
  ordered_json doc;
  doc["coverage_radius"] = report.coverage_radius;
  ordered_json objects = ordered_json::array();
  for (const auto& o : report.objects) {
    ordered_json jo;
    jo["instance_id"] = o.instance_id;
    jo["coverage_min"] = o.coverage_min;
    jo["coverage_mean"] = o.coverage_mean;
    jo["coverage_max"] = o.coverage_max;
    jo["chamfer_mean"] = o.chamfer_mean ? ordered_json(*o.chamfer_mean) : ordered_json(nullptr);
    jo["frame_coverage"] = o.frame_coverage;
    ordered_json ch = ordered_json::array();
    for (const auto& c : o.frame_chamfer) ch.push_back(c ? ordered_json(*c) : ordered_json(nullptr));
    jo["frame_chamfer"] = std::move(ch);
    objects.push_back(std::move(jo));
  }
  doc["objects"] = std::move(objects);
  if (report.tracking) doc["tracking"] = {{"precision", report.tracking->precision}, {"recall", report.tracking->recall}};
  if (report.registration) {
    doc["registration"] = {{"rotation_deg", report.registration->rotation_deg},
                           {"translation_m", report.registration->translation_m}};
  }
  return doc.dump(2) + "\n";
}

std::string to_json(const FusionReport& report) {
  ordered_json doc;
  doc["total_candidates"] = report.total_candidates;
  doc["total_added"] = report.total_added;
  ordered_json tracks = ordered_json::array();
  for (const auto& t : report.tracks) {
    ordered_json jt;
    jt["track_id"] = t.track_id;
    jt["view_count"] = t.view_count;
    jt["merged_point_count"] = t.merged_point_count;
    jt["fallback_count"] = t.fallback_count;
    ordered_json res = ordered_json::array();
    for (const auto& r : t.icp_residuals) res.push_back(r ? ordered_json(*r) : ordered_json(nullptr));
    jt["icp_residuals"] = std::move(res);
    tracks.push_back(std::move(jt));
  }
  doc["tracks"] = std::move(tracks);
  ordered_json frames = ordered_json::array();
  for (const auto& f : report.frames) {
    frames.push_back({{"frame_index", f.frame_index},
                      {"original_count", f.original_count},
                      {"candidate_count", f.candidate_count},
                      {"added_count", f.added_count}});
  }
  doc["frames"] = std::move(frames);
  return doc.dump(2) + "\n";
}

void write_text(const fs::path& path, const std::string& text) { detail::write_file(path, text); }

std::string read_text(const fs::path& path) { return detail::read_file(path); }

}  // namespace xray::io
