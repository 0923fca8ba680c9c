/*
 * Copyright 2026 The echokit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * echokit C API.
 *
 * Every fallible call returns an ek_status; on failure ek_last_error() holds
 * the message for the calling thread. Objects are opaque handles owned by the
 * caller and released with the matching *_free function. Pointers returned
 * through "view" accessors stay valid until the owning handle is freed or
 * modified.
 */

#ifndef ECHOKIT_H
#define ECHOKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ECHOKIT_BUILDING)
#    define ECHOKIT_API __declspec(dllexport)
#  else
#    define ECHOKIT_API __declspec(dllimport)
#  endif
#else
#  define ECHOKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ek_status {
    EK_OK = 0,
    EK_ERR_ARGUMENT = 1,
    EK_ERR_IO = 2,
    EK_ERR_FORMAT = 3,
    EK_ERR_TRUNCATED = 4,
    EK_ERR_VALIDATION = 5,
    EK_ERR_INDEX = 6,
    EK_ERR_PRECONDITION = 7,
    EK_ERR_JOIN = 8,
    EK_ERR_CONFLICT = 9,
    EK_ERR_INTERNAL = 10
} ek_status;

ECHOKIT_API const char* ek_version(void);
ECHOKIT_API const char* ek_status_name(ek_status status);
ECHOKIT_API const char* ek_last_error(void);
ECHOKIT_API void ek_string_free(char* text);

typedef struct ek_clip ek_clip;
typedef struct ek_echogram ek_echogram;
typedef struct ek_tracks ek_tracks;
typedef struct ek_labels ek_labels;
typedef struct ek_predictions ek_predictions;
typedef struct ek_manifest ek_manifest;
typedef struct ek_synth ek_synth;

/* ---- sonar clips (SVC1) ------------------------------------------------ */

typedef enum ek_side { EK_SIDE_LEFT = 0, EK_SIDE_RIGHT = 1 } ek_side;

typedef struct ek_clip_header {
    uint32_t frame_count;
    uint32_t range_samples;
    uint32_t beam_count;
    float frame_rate;
    float window_start;
    float window_end;
    float beam_fov;
    ek_side upstream_side;
} ek_clip_header;

/* samples: frame_count * range_samples * beam_count bytes, range-major, beam fastest. */
ECHOKIT_API ek_status ek_clip_create(const ek_clip_header* header, const uint8_t* samples, size_t count,
                                     ek_clip** out);
ECHOKIT_API ek_status ek_clip_read(const char* path, ek_clip** out);
ECHOKIT_API ek_status ek_clip_write(const ek_clip* clip, const char* path);
ECHOKIT_API void ek_clip_free(ek_clip* clip);
ECHOKIT_API ek_status ek_clip_get_header(const ek_clip* clip, ek_clip_header* out);
ECHOKIT_API ek_status ek_clip_samples(const ek_clip* clip, const uint8_t** data, size_t* count);
/* out receives range_samples * beam_count means. */
ECHOKIT_API ek_status ek_clip_mean_frame(const ek_clip* clip, double* out, size_t count);
ECHOKIT_API ek_status ek_range_of_sample(const ek_clip_header* header, uint32_t row, double* meters);

/* ---- background subtraction -------------------------------------------- */

typedef struct ek_preprocess_config {
    double alpha0;
    double alpha1;
    double alpha2;
    double size_thresh;
    double reference_range;
    int sweep; /* nonzero: allow degenerate alpha orderings */
} ek_preprocess_config;

ECHOKIT_API void ek_preprocess_config_default(ek_preprocess_config* out);
ECHOKIT_API ek_status ek_preprocess_config_validate(const ek_preprocess_config* config);
/* The four published sweep rows; *count receives 4 even if capacity is smaller. */
ECHOKIT_API ek_status ek_sweep_table(double reference_range, ek_preprocess_config* out, size_t capacity,
                                     size_t* count);
ECHOKIT_API ek_status ek_clip_clean(const ek_clip* clip, const ek_preprocess_config* config, unsigned jobs,
                                    ek_clip** out);

/* ---- echograms (ECG1) --------------------------------------------------- */

typedef struct ek_echogram_info {
    uint32_t width;
    uint32_t height;
    uint32_t x_offset;
    uint32_t pad_start;
    int padded;
} ek_echogram_info;

ECHOKIT_API ek_status ek_echogram_build(const ek_clip* clip, const ek_preprocess_config* config,
                                        const char* clip_id, unsigned jobs, ek_echogram** out);
ECHOKIT_API ek_status ek_echogram_read(const char* path, ek_echogram** out);
ECHOKIT_API ek_status ek_echogram_write(const ek_echogram* echogram, const char* path);
ECHOKIT_API void ek_echogram_free(ek_echogram* echogram);
ECHOKIT_API ek_status ek_echogram_get_info(const ek_echogram* echogram, ek_echogram_info* out);
ECHOKIT_API const char* ek_echogram_clip_id(const ek_echogram* echogram);
ECHOKIT_API ek_status ek_echogram_set_origin(ek_echogram* echogram, const char* clip_id, uint32_t x_offset);
ECHOKIT_API ek_status ek_echogram_intensity(const ek_echogram* echogram, const uint8_t** data, size_t* count);
ECHOKIT_API ek_status ek_echogram_lateral(const ek_echogram* echogram, double* out, size_t count);
ECHOKIT_API ek_status ek_echogram_nonzero_count(const ek_echogram* echogram, size_t* count);
ECHOKIT_API ek_status ek_echogram_slice(const ek_echogram* echogram, uint32_t window, uint32_t stride,
                                        ek_echogram*** slices, size_t* count);
ECHOKIT_API void ek_echogram_array_free(ek_echogram** slices, size_t count);
/* out receives 2 * out_height * out_width floats, channel-major. */
ECHOKIT_API ek_status ek_echogram_normalize(const ek_echogram* slice, uint32_t out_height, uint32_t out_width,
                                            float* out, size_t count);
ECHOKIT_API ek_status ek_echogram_export_png(const ek_echogram* echogram, const char* path);

/* ---- augmentation ------------------------------------------------------- */

typedef enum ek_augment_op { EK_AUG_VFLIP = 0, EK_AUG_HFLIP = 1, EK_AUG_RHFLIP = 2 } ek_augment_op;

ECHOKIT_API ek_status ek_augment_parse(const char* name, ek_augment_op* out);
ECHOKIT_API ek_status ek_echogram_augment(const ek_echogram* slice, ek_augment_op op, ek_echogram** out);
ECHOKIT_API ek_status ek_echogram_superpose(const ek_echogram* a, const ek_echogram* b, ek_echogram** out);
ECHOKIT_API ek_status ek_labels_augment(const ek_labels* labels, ek_augment_op op, ek_labels** out);
/* Record-wise sum; both sets must have the same length. */
ECHOKIT_API ek_status ek_labels_superpose(const ek_labels* a, const ek_labels* b, ek_labels** out);

/* ---- tracks, labels, evaluation ----------------------------------------- */

typedef enum ek_label_source {
    EK_SOURCE_STRONG = 0,
    EK_SOURCE_WEAK = 1,
    EK_SOURCE_SYNTHETIC = 2
} ek_label_source;

typedef struct ek_label_view {
    const char* clip_id;
    uint32_t x_offset;
    uint32_t left;
    uint32_t right;
    ek_label_source source;
} ek_label_view;

ECHOKIT_API ek_status ek_tracks_read(const char* path, ek_tracks** out);
ECHOKIT_API ek_status ek_tracks_write(const ek_tracks* tracks, const char* path);
ECHOKIT_API void ek_tracks_free(ek_tracks* tracks);
ECHOKIT_API ek_status ek_tracks_orient(const ek_tracks* tracks, ek_tracks** out);
/* Requires an oriented track set (upstream side right). */
ECHOKIT_API ek_status ek_tracks_count(const ek_tracks* tracks, uint32_t window, uint32_t total_frames,
                                      ek_label_source source, ek_labels** out);

ECHOKIT_API ek_status ek_labels_create(ek_labels** out);
ECHOKIT_API ek_status ek_labels_append(ek_labels* labels, const ek_label_view* label);
ECHOKIT_API ek_status ek_labels_read(const char* path, ek_labels** out);
ECHOKIT_API ek_status ek_labels_write(const ek_labels* labels, const char* path);
ECHOKIT_API void ek_labels_free(ek_labels* labels);
ECHOKIT_API size_t ek_labels_size(const ek_labels* labels);
ECHOKIT_API ek_status ek_labels_get(const ek_labels* labels, size_t index, ek_label_view* out);

ECHOKIT_API ek_status ek_predictions_read(const char* path, ek_predictions** out);
ECHOKIT_API ek_status ek_predictions_write(const ek_predictions* predictions, const char* path);
ECHOKIT_API ek_status ek_predictions_from_labels(const ek_labels* labels, ek_predictions** out);
ECHOKIT_API void ek_predictions_free(ek_predictions* predictions);
ECHOKIT_API size_t ek_predictions_size(const ek_predictions* predictions);

typedef struct ek_eval_report {
    size_t n_clips;
    double total_nmae;
    double left_nmae;
    double right_nmae;
    int total_defined; /* 0 when the target sum is zero */
    int left_defined;
    int right_defined;
    double total_error;
    double total_target;
    double left_error;
    double left_target;
    double right_error;
    double right_target;
} ek_eval_report;

ECHOKIT_API ek_status ek_evaluate(const ek_predictions* predictions, const ek_labels* labels,
                                  ek_eval_report* out);
ECHOKIT_API ek_status ek_eval_report_json(const ek_eval_report* report, char** json);

/* ---- synthetic clips ---------------------------------------------------- */

ECHOKIT_API ek_status ek_synth_config_read(const char* path, ek_synth** out);
ECHOKIT_API ek_status ek_synth_suite_config(uint64_t seed, uint32_t index, ek_synth** out);
ECHOKIT_API void ek_synth_free(ek_synth* config);
ECHOKIT_API const char* ek_synth_clip_id(const ek_synth* config);
ECHOKIT_API ek_status ek_synth_config_text(const ek_synth* config, char** text);
/* Any of the outputs may be NULL when not wanted. */
ECHOKIT_API ek_status ek_synth_run(const ek_synth* config, ek_clip** clip, ek_tracks** tracks,
                                   ek_labels** labels);

/* ---- dataset manifests -------------------------------------------------- */

/* Either directory may be NULL. */
ECHOKIT_API ek_status ek_manifest_build(const char* strong_dir, const char* weak_dir, const char* splits_path,
                                        ek_manifest** out);
ECHOKIT_API ek_status ek_manifest_read(const char* path, ek_manifest** out);
ECHOKIT_API ek_status ek_manifest_write(const ek_manifest* manifest, const char* path);
ECHOKIT_API void ek_manifest_free(ek_manifest* manifest);
ECHOKIT_API size_t ek_manifest_size(const ek_manifest* manifest);
/* *disjoint is 1 when no clip spans two splits; report carries leaks and class balance. */
ECHOKIT_API ek_status ek_manifest_check(const ek_manifest* manifest, int* disjoint, char** report_json);
ECHOKIT_API ek_status ek_slice_file_name(const char* clip_id, uint32_t x_offset, char** out);

#ifdef __cplusplus
}
#endif

#endif /* ECHOKIT_H */
