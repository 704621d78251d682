/*
 * C interface to the xray object-completion toolkit.
 *
 * All functions returning xray_status report failures through the status code
 * and a thread-local message available from xray_last_error(). Handles are
 * opaque; every handle returned through an out-parameter must be released with
 * the matching *_free function. Strings returned through char** are released
 * with xray_string_free().
 */
#ifndef XRAY_XRAY_H_
#define XRAY_XRAY_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(XRAY_BUILDING_LIBRARY)
#    define XRAY_API __declspec(dllexport)
#  else
#    define XRAY_API __declspec(dllimport)
#  endif
#else
#  define XRAY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xray_status {
  XRAY_OK = 0,
  XRAY_ERR_INVALID_ARGUMENT = 1,
  XRAY_ERR_IO = 2,
  XRAY_ERR_FORMAT = 3,
  XRAY_ERR_NO_OVERLAP = 4,
  XRAY_ERR_INTERNAL = 5
} xray_status;

typedef struct xray_sequence xray_sequence;
typedef struct xray_tracks xray_tracks;
typedef struct xray_tensor xray_tensor;

XRAY_API const char* xray_version(void);
/* Stable snake_case name of a status, e.g. "format_error". */
XRAY_API const char* xray_status_name(xray_status status);
/* Message of the last failed call on this thread; "" after a success. */
XRAY_API const char* xray_last_error(void);
XRAY_API void xray_string_free(char* s);

/* ---- simulation -------------------------------------------------------- */

/* Generates the scene described by a JSON config and writes the sequence
 * directory plus ground truth (ground_truth.json, surface blobs) to out_dir. */
XRAY_API xray_status xray_simulate(const char* config_path, const char* out_dir);

XRAY_API xray_status xray_inject_box_noise(const xray_sequence* seq, double yaw_sigma, double center_sigma,
                                           uint64_t seed, xray_sequence** out);

/* ---- sequences --------------------------------------------------------- */

XRAY_API xray_status xray_sequence_read(const char* dir, xray_sequence** out);
XRAY_API xray_status xray_sequence_write(const xray_sequence* seq, const char* dir);
XRAY_API void xray_sequence_free(xray_sequence* seq);
XRAY_API size_t xray_sequence_frame_count(const xray_sequence* seq);
/* original_point_count equals point_count for frames that were not fused. */
XRAY_API xray_status xray_sequence_frame_info(const xray_sequence* seq, size_t frame, size_t* point_count,
                                              size_t* instance_count, size_t* original_point_count);

/* ---- tracking ---------------------------------------------------------- */

typedef enum xray_tracking_mode { XRAY_TRACK_GREEDY = 0, XRAY_TRACK_INSTANCE_IDS = 1 } xray_tracking_mode;

XRAY_API xray_status xray_track(const xray_sequence* seq, xray_tracking_mode mode, xray_tracks** out);
XRAY_API xray_status xray_tracks_read(const char* path, xray_tracks** out);
XRAY_API xray_status xray_tracks_write(const xray_tracks* tracks, const char* path);
XRAY_API void xray_tracks_free(xray_tracks* tracks);
XRAY_API size_t xray_tracks_count(const xray_tracks* tracks);
XRAY_API xray_status xray_tracks_get(const xray_tracks* tracks, size_t index, int64_t* track_id, size_t* length);

/* ---- fusion ------------------------------------------------------------ */

typedef enum xray_merge_strategy { XRAY_MERGE_GEOMETRY = 0, XRAY_MERGE_ICP = 1 } xray_merge_strategy;

typedef struct xray_fusion_config {
  xray_merge_strategy strategy;
  double subsample_factor; /* INFINITY disables subsampling */
  uint64_t seed;
  int icp_max_iterations;
  double icp_convergence_tol;
  double icp_max_correspondence_dist;
} xray_fusion_config;

/* Defaults: geometry, factor 1.5, seed 0, ICP 50 / 1e-4 m / 0.5 m. */
XRAY_API void xray_fusion_config_init(xray_fusion_config* cfg);

/* Builds Object-Complete frames. report_json may be NULL. */
XRAY_API xray_status xray_fuse(const xray_sequence* seq, const xray_tracks* tracks, const xray_fusion_config* cfg,
                               xray_sequence** out, char** report_json);

/* ---- evaluation -------------------------------------------------------- */

/* Scores seq against the ground truth stored in truth_dir. tracks may be NULL. */
XRAY_API xray_status xray_evaluate(const xray_sequence* seq, const char* truth_dir, double coverage_radius,
                                   const xray_tracks* tracks, char** report_json);

/* ---- distillation ------------------------------------------------------ */

XRAY_API xray_status xray_tensor_create(const size_t* shape, size_t rank, const double* data, xray_tensor** out);
XRAY_API xray_status xray_tensor_read(const char* path, xray_tensor** out);
XRAY_API xray_status xray_tensor_write(const xray_tensor* tensor, const char* path);
XRAY_API void xray_tensor_free(xray_tensor* tensor);
XRAY_API size_t xray_tensor_rank(const xray_tensor* tensor);
XRAY_API size_t xray_tensor_dim(const xray_tensor* tensor, size_t axis);
XRAY_API size_t xray_tensor_size(const xray_tensor* tensor);
XRAY_API const double* xray_tensor_data(const xray_tensor* tensor);

typedef struct xray_distill_config {
  double alpha1;
  double alpha2;
  double lambda1;
  double lambda2;
  double lambda3;
  int compact_pairing; /* nonzero: alpha1 weighs the regression MSE, alpha2 the KL */
} xray_distill_config;

typedef struct xray_loss_breakdown {
  double l_heads;
  double l_kd_cls;
  double l_kd_reg;
  double l_feat;
  double l_det;
  double total;
} xray_loss_breakdown;

/* Defaults: alpha1 2, alpha2 1, lambda1 0.7, lambda2 0.3, lambda3 1. */
XRAY_API void xray_distill_config_init(xray_distill_config* cfg);

XRAY_API xray_status xray_project_channels(const xray_tensor* features, const xray_tensor* weights,
                                           const xray_tensor* bias, xray_tensor** out);

/* Classification tensors hold probabilities over the last axis. */
XRAY_API xray_status xray_distillation_losses(const xray_tensor* student_cls, const xray_tensor* teacher_cls,
                                              const xray_tensor* student_reg, const xray_tensor* teacher_reg,
                                              const xray_tensor* student_feat, const xray_tensor* teacher_feat,
                                              double l_det, const xray_distill_config* cfg,
                                              xray_loss_breakdown* out);

/* ---- export ------------------------------------------------------------ */

/* ASCII PLY of one frame; with highlight_added, fused points are drawn red. */
XRAY_API xray_status xray_export_ply(const xray_sequence* seq, size_t frame, const char* path, int highlight_added);

#ifdef __cplusplus
}
#endif

#endif /* XRAY_XRAY_H_ */
