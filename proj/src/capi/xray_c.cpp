#include "xray/xray.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "xray/completion/fusion.hpp"
#include "xray/core/error.hpp"
#include "xray/distill/losses.hpp"
#include "xray/eval/metrics.hpp"
#include "xray/io/files.hpp"
#include "xray/io/sequence_io.hpp"
#include "xray/simulate/scene.hpp"
#include "xray/tracking/tracker.hpp"

struct xray_sequence {
  xray::Sequence value;
};

struct xray_tracks {
  std::vector<xray::Track> value;
};

struct xray_tensor {
  xray::Tensor value;
};

namespace {

thread_local std::string g_last_error;

xray_status to_status(xray::ErrorCode code) { return static_cast<xray_status>(static_cast<int>(code)); }

template <class Fn>
xray_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return XRAY_OK;
  } catch (const xray::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return XRAY_ERR_INTERNAL;
}

template <class... Ptrs>
void require(const char* what, Ptrs... ptrs) {
  if (((ptrs == nullptr) || ...)) xray::fail(xray::ErrorCode::InvalidArgument, std::string(what) + ": null argument");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* xray_version(void) { return "0.1.0"; }

const char* xray_status_name(xray_status status) {
  if (status == XRAY_OK) return "ok";
  if (status >= XRAY_ERR_INVALID_ARGUMENT && status <= XRAY_ERR_INTERNAL) {
    return xray::error_code_name(static_cast<xray::ErrorCode>(static_cast<int>(status)));
  }
  return "unknown";
}

const char* xray_last_error(void) { return g_last_error.c_str(); }

void xray_string_free(char* s) { delete[] s; }

xray_status xray_simulate(const char* config_path, const char* out_dir) {
  return guarded([&] {
    require("xray_simulate", config_path, out_dir);
    const auto scene = xray::generate(xray::io::read_scene_config(config_path));
    xray::io::write_sequence(scene.sequence, out_dir);
    xray::io::write_ground_truth(scene.truth, out_dir);
  });
}

xray_status xray_inject_box_noise(const xray_sequence* seq, double yaw_sigma, double center_sigma, uint64_t seed,
                                  xray_sequence** out) {
  return guarded([&] {
    require("xray_inject_box_noise", seq, out);
    *out = new xray_sequence{xray::inject_box_noise(seq->value, yaw_sigma, center_sigma, seed)};
  });
}

xray_status xray_sequence_read(const char* dir, xray_sequence** out) {
  return guarded([&] {
    require("xray_sequence_read", dir, out);
    *out = new xray_sequence{xray::io::read_sequence(dir)};
  });
}

xray_status xray_sequence_write(const xray_sequence* seq, const char* dir) {
  return guarded([&] {
    require("xray_sequence_write", seq, dir);
    xray::io::write_sequence(seq->value, dir);
  });
}

void xray_sequence_free(xray_sequence* seq) { delete seq; }

size_t xray_sequence_frame_count(const xray_sequence* seq) { return seq ? seq->value.frames.size() : 0; }

xray_status xray_sequence_frame_info(const xray_sequence* seq, size_t frame, size_t* point_count,
                                     size_t* instance_count, size_t* original_point_count) {
  return guarded([&] {
    require("xray_sequence_frame_info", seq);
    if (frame >= seq->value.frames.size()) xray::fail(xray::ErrorCode::InvalidArgument, "frame index out of range");
    const auto& f = seq->value.frames[frame];
    if (point_count) *point_count = f.cloud.size();
    if (instance_count) *instance_count = f.instances.size();
    if (original_point_count) *original_point_count = f.original_point_count.value_or(f.cloud.size());
  });
}

xray_status xray_track(const xray_sequence* seq, xray_tracking_mode mode, xray_tracks** out) {
  return guarded([&] {
    require("xray_track", seq, out);
    if (mode != XRAY_TRACK_GREEDY && mode != XRAY_TRACK_INSTANCE_IDS) {
      xray::fail(xray::ErrorCode::InvalidArgument, "unknown tracking mode");
    }
    auto tracks = mode == XRAY_TRACK_GREEDY ? xray::greedy_track(seq->value) : xray::track_instances_from_ids(seq->value);
    *out = new xray_tracks{std::move(tracks)};
  });
}

xray_status xray_tracks_read(const char* path, xray_tracks** out) {
  return guarded([&] {
    require("xray_tracks_read", path, out);
    *out = new xray_tracks{xray::io::read_tracks(path)};
  });
}

xray_status xray_tracks_write(const xray_tracks* tracks, const char* path) {
  return guarded([&] {
    require("xray_tracks_write", tracks, path);
    xray::io::write_tracks(path, tracks->value);
  });
}

void xray_tracks_free(xray_tracks* tracks) { delete tracks; }

size_t xray_tracks_count(const xray_tracks* tracks) { return tracks ? tracks->value.size() : 0; }

xray_status xray_tracks_get(const xray_tracks* tracks, size_t index, int64_t* track_id, size_t* length) {
  return guarded([&] {
    require("xray_tracks_get", tracks);
    if (index >= tracks->value.size()) xray::fail(xray::ErrorCode::InvalidArgument, "track index out of range");
    if (track_id) *track_id = tracks->value[index].track_id;
    if (length) *length = tracks->value[index].occurrences.size();
  });
}

void xray_fusion_config_init(xray_fusion_config* cfg) {
  if (!cfg) return;
  const xray::FusionConfig d;
  cfg->strategy = XRAY_MERGE_GEOMETRY;
  cfg->subsample_factor = d.subsample_factor;
  cfg->seed = d.seed;
  cfg->icp_max_iterations = d.icp.max_iterations;
  cfg->icp_convergence_tol = d.icp.convergence_tol;
  cfg->icp_max_correspondence_dist = d.icp.max_correspondence_dist;
}

xray_status xray_fuse(const xray_sequence* seq, const xray_tracks* tracks, const xray_fusion_config* cfg,
                      xray_sequence** out, char** report_json) {
  return guarded([&] {
    require("xray_fuse", seq, tracks, cfg, out);
    if (cfg->strategy != XRAY_MERGE_GEOMETRY && cfg->strategy != XRAY_MERGE_ICP) {
      xray::fail(xray::ErrorCode::InvalidArgument, "unknown merge strategy");
    }
    xray::FusionConfig fc;
    fc.strategy = cfg->strategy == XRAY_MERGE_ICP ? xray::MergeStrategy::Icp : xray::MergeStrategy::Geometry;
    fc.subsample_factor = cfg->subsample_factor;
    fc.seed = cfg->seed;
    fc.icp.max_iterations = cfg->icp_max_iterations;
    fc.icp.convergence_tol = cfg->icp_convergence_tol;
    fc.icp.max_correspondence_dist = cfg->icp_max_correspondence_dist;
    auto result = xray::fuse_sequence(seq->value, tracks->value, fc);
    std::string report = report_json ? xray::io::to_json(result.report) : std::string();
    *out = new xray_sequence{std::move(result.sequence)};
    if (report_json) *report_json = dup_string(report);
  });
}

xray_status xray_evaluate(const xray_sequence* seq, const char* truth_dir, double coverage_radius,
                          const xray_tracks* tracks, char** report_json) {
  return guarded([&] {
    require("xray_evaluate", seq, truth_dir, report_json);
    const auto truth = xray::io::read_ground_truth(truth_dir);
    std::optional<std::span<const xray::Track>> predicted;
    if (tracks) predicted = std::span<const xray::Track>(tracks->value);
    const auto report = xray::evaluate_sequence(seq->value, truth, coverage_radius, predicted);
    *report_json = dup_string(xray::io::to_json(report));
  });
}

xray_status xray_tensor_create(const size_t* shape, size_t rank, const double* data, xray_tensor** out) {
  return guarded([&] {
    require("xray_tensor_create", data, out);
    if (rank > 0) require("xray_tensor_create", shape);
    std::vector<std::size_t> s(shape, shape + rank);
    std::size_t n = 1;
    for (auto d : s) n *= d;
    *out = new xray_tensor{xray::Tensor(std::move(s), std::vector<double>(data, data + n))};
  });
}

xray_status xray_tensor_read(const char* path, xray_tensor** out) {
  return guarded([&] {
    require("xray_tensor_read", path, out);
    *out = new xray_tensor{xray::io::read_tensor(path)};
  });
}

xray_status xray_tensor_write(const xray_tensor* tensor, const char* path) {
  return guarded([&] {
    require("xray_tensor_write", tensor, path);
    xray::io::write_tensor(path, tensor->value);
  });
}

void xray_tensor_free(xray_tensor* tensor) { delete tensor; }

size_t xray_tensor_rank(const xray_tensor* tensor) { return tensor ? tensor->value.rank() : 0; }

size_t xray_tensor_dim(const xray_tensor* tensor, size_t axis) {
  return tensor && axis < tensor->value.rank() ? tensor->value.shape()[axis] : 0;
}

size_t xray_tensor_size(const xray_tensor* tensor) { return tensor ? tensor->value.size() : 0; }

const double* xray_tensor_data(const xray_tensor* tensor) { return tensor ? tensor->value.data().data() : nullptr; }

void xray_distill_config_init(xray_distill_config* cfg) {
  if (!cfg) return;
  const xray::DistillationConfig d;
  *cfg = {d.alpha1, d.alpha2, d.lambda1, d.lambda2, d.lambda3, 0};
}

xray_status xray_project_channels(const xray_tensor* features, const xray_tensor* weights, const xray_tensor* bias,
                                  xray_tensor** out) {
  return guarded([&] {
    require("xray_project_channels", features, weights, bias, out);
    *out = new xray_tensor{xray::project_channels(features->value, weights->value, bias->value)};
  });
}

xray_status xray_distillation_losses(const xray_tensor* student_cls, const xray_tensor* teacher_cls,
                                     const xray_tensor* student_reg, const xray_tensor* teacher_reg,
                                     const xray_tensor* student_feat, const xray_tensor* teacher_feat, double l_det,
                                     const xray_distill_config* cfg, xray_loss_breakdown* out) {
  return guarded([&] {
    require("xray_distillation_losses", student_cls, teacher_cls, student_reg, teacher_reg, student_feat, teacher_feat,
            cfg, out);
    xray::DistillationConfig dc{cfg->alpha1, cfg->alpha2, cfg->lambda1, cfg->lambda2, cfg->lambda3,
                                cfg->compact_pairing ? xray::HeadsPairing::Compact : xray::HeadsPairing::Expanded};
    const auto b = xray::distillation_losses(student_cls->value, teacher_cls->value, student_reg->value,
                                             teacher_reg->value, teacher_feat->value, student_feat->value, l_det, dc);
    *out = {b.l_heads, b.l_kd_cls, b.l_kd_reg, b.l_feat, b.l_det, b.total};
  });
}

xray_status xray_export_ply(const xray_sequence* seq, size_t frame, const char* path, int highlight_added) {
  return guarded([&] {
    require("xray_export_ply", seq, path);
    if (frame >= seq->value.frames.size()) xray::fail(xray::ErrorCode::InvalidArgument, "frame index out of range");
    const auto& f = seq->value.frames[frame];
    std::optional<std::size_t> from;
    if (highlight_added) from = f.original_point_count.value_or(f.cloud.size());
    xray::io::export_ply(f.cloud, path, {}, from);
  });
}

}  // extern "C"
