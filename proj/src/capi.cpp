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

#include "echokit/echokit.h"

#include "echokit/augment.hpp"
#include "echokit/counts.hpp"
#include "echokit/dataset.hpp"
#include "echokit/echogram.hpp"
#include "echokit/error.hpp"
#include "echokit/preprocess.hpp"
#include "echokit/sonar_format.hpp"
#include "echokit/synth.hpp"
#include "echokit/version.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

struct ek_clip {
    echokit::Clip value;
};
struct ek_echogram {
    echokit::Echogram value;
};
struct ek_tracks {
    echokit::TrackSet value;
};
struct ek_labels {
    std::vector<echokit::CountLabel> value;
};
struct ek_predictions {
    std::vector<echokit::Prediction> value;
};
struct ek_manifest {
    echokit::Manifest value;
};
struct ek_synth {
    echokit::SynthConfig value;
};

namespace {

thread_local std::string last_error;

ek_status to_status(echokit::ErrorCode code) {
    using echokit::ErrorCode;
    switch (code) {
    case ErrorCode::Argument: return EK_ERR_ARGUMENT;
    case ErrorCode::Io: return EK_ERR_IO;
    case ErrorCode::Format: return EK_ERR_FORMAT;
    case ErrorCode::Truncation: return EK_ERR_TRUNCATED;
    case ErrorCode::Validation: return EK_ERR_VALIDATION;
    case ErrorCode::Index: return EK_ERR_INDEX;
    case ErrorCode::Precondition: return EK_ERR_PRECONDITION;
    case ErrorCode::Join: return EK_ERR_JOIN;
    case ErrorCode::Conflict: return EK_ERR_CONFLICT;
    }
    return EK_ERR_INTERNAL;
}

template <typename Fn>
ek_status guarded(Fn&& fn) noexcept {
    try {
        last_error.clear();
        fn();
        return EK_OK;
    } catch (const echokit::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return EK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return EK_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return EK_ERR_INTERNAL;
    }
}

template <typename T>
const T& need(const T* p, const char* what) {
    if (!p) echokit::fail(echokit::ErrorCode::Argument, std::string(what) + " must not be NULL");
    return *p;
}

template <typename T>
T& need_out(T* p, const char* what) {
    if (!p) echokit::fail(echokit::ErrorCode::Argument, std::string(what) + " must not be NULL");
    return *p;
}

const char* need_str(const char* s, const char* what) {
    if (!s) echokit::fail(echokit::ErrorCode::Argument, std::string(what) + " must not be NULL");
    return s;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

echokit::ClipHeader from_c(const ek_clip_header& h) {
    echokit::ClipHeader out;
    out.frame_count = h.frame_count;
    out.range_samples = h.range_samples;
    out.beam_count = h.beam_count;
    out.frame_rate = h.frame_rate;
    out.window_start = h.window_start;
    out.window_end = h.window_end;
    out.beam_fov = h.beam_fov;
    if (h.upstream_side != EK_SIDE_LEFT && h.upstream_side != EK_SIDE_RIGHT)
        echokit::fail(echokit::ErrorCode::Validation, "upstream_side: must be 0 (left) or 1 (right)");
    out.upstream_side = static_cast<echokit::Side>(h.upstream_side);
    return out;
}

ek_clip_header to_c(const echokit::ClipHeader& h) {
    return {h.frame_count, h.range_samples, h.beam_count, h.frame_rate, h.window_start,
            h.window_end,  h.beam_fov,      static_cast<ek_side>(h.upstream_side)};
}

echokit::PreprocessConfig from_c(const ek_preprocess_config& c) {
    return {c.alpha0, c.alpha1, c.alpha2, c.size_thresh, c.reference_range, c.sweep != 0};
}

ek_preprocess_config to_c(const echokit::PreprocessConfig& c) {
    return {c.alpha0, c.alpha1, c.alpha2, c.size_thresh, c.reference_range, c.sweep ? 1 : 0};
}

echokit::LabelSource from_c(ek_label_source s) {
    switch (s) {
    case EK_SOURCE_STRONG: return echokit::LabelSource::Strong;
    case EK_SOURCE_WEAK: return echokit::LabelSource::Weak;
    case EK_SOURCE_SYNTHETIC: return echokit::LabelSource::Synthetic;
    }
    echokit::fail(echokit::ErrorCode::Argument, "unknown label source");
}

echokit::AugmentOp from_c(ek_augment_op op) {
    switch (op) {
    case EK_AUG_VFLIP: return echokit::AugmentOp::VFlip;
    case EK_AUG_HFLIP: return echokit::AugmentOp::HFlipNaive;
    case EK_AUG_RHFLIP: return echokit::AugmentOp::HFlipRealistic;
    }
    echokit::fail(echokit::ErrorCode::Argument, "unknown augmentation op");
}

} // namespace

extern "C" {

const char* ek_version(void) { return echokit::kVersion; }

const char* ek_status_name(ek_status status) {
    switch (status) {
    case EK_OK: return "ok";
    case EK_ERR_ARGUMENT: return "argument error";
    case EK_ERR_IO: return "I/O error";
    case EK_ERR_FORMAT: return "format error";
    case EK_ERR_TRUNCATED: return "truncation error";
    case EK_ERR_VALIDATION: return "validation error";
    case EK_ERR_INDEX: return "index error";
    case EK_ERR_PRECONDITION: return "precondition error";
    case EK_ERR_JOIN: return "join error";
    case EK_ERR_CONFLICT: return "conflict error";
    case EK_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ek_last_error(void) { return last_error.c_str(); }

void ek_string_free(char* text) { std::free(text); }

// ---- clips

ek_status ek_clip_create(const ek_clip_header* header, const uint8_t* samples, size_t count, ek_clip** out) {
    return guarded([&] {
        const echokit::ClipHeader h = from_c(need(header, "header"));
        if (!samples && count > 0) echokit::fail(echokit::ErrorCode::Argument, "samples must not be NULL");
        std::vector<std::uint8_t> data(samples, samples + count);
        need_out(out, "out") = new ek_clip{echokit::Clip(h, std::move(data))};
    });
}

ek_status ek_clip_read(const char* path, ek_clip** out) {
    return guarded([&] { need_out(out, "out") = new ek_clip{echokit::read_clip(need_str(path, "path"))}; });
}

ek_status ek_clip_write(const ek_clip* clip, const char* path) {
    return guarded([&] { echokit::write_clip(need(clip, "clip").value, need_str(path, "path")); });
}

void ek_clip_free(ek_clip* clip) { delete clip; }

ek_status ek_clip_get_header(const ek_clip* clip, ek_clip_header* out) {
    return guarded([&] { need_out(out, "out") = to_c(need(clip, "clip").value.header()); });
}

ek_status ek_clip_samples(const ek_clip* clip, const uint8_t** data, size_t* count) {
    return guarded([&] {
        const auto samples = need(clip, "clip").value.samples();
        need_out(data, "data") = samples.data();
        need_out(count, "count") = samples.size();
    });
}

ek_status ek_clip_mean_frame(const ek_clip* clip, double* out, size_t count) {
    return guarded([&] {
        const echokit::MeanFrame mean = echokit::mean_frame(need(clip, "clip").value);
        if (!out || count < mean.values.size())
            echokit::fail(echokit::ErrorCode::Argument, "output buffer needs " +
                                                            std::to_string(mean.values.size()) + " doubles");
        std::copy(mean.values.begin(), mean.values.end(), out);
    });
}

ek_status ek_range_of_sample(const ek_clip_header* header, uint32_t row, double* meters) {
    return guarded([&] {
        const echokit::ClipHeader h = from_c(need(header, "header"));
        h.validate();
        need_out(meters, "meters") = echokit::range_of_sample(h, row);
    });
}

// ---- preprocess

void ek_preprocess_config_default(ek_preprocess_config* out) {
    if (out) *out = to_c(echokit::PreprocessConfig{});
}

ek_status ek_preprocess_config_validate(const ek_preprocess_config* config) {
    return guarded([&] { from_c(need(config, "config")).validate(); });
}

ek_status ek_sweep_table(double reference_range, ek_preprocess_config* out, size_t capacity, size_t* count) {
    return guarded([&] {
        const auto table = echokit::sweep_table_configs(reference_range);
        need_out(count, "count") = table.size();
        if (capacity > 0 && !out) echokit::fail(echokit::ErrorCode::Argument, "out must not be NULL");
        for (std::size_t i = 0; i < table.size() && i < capacity; ++i) out[i] = to_c(table[i]);
    });
}

ek_status ek_clip_clean(const ek_clip* clip, const ek_preprocess_config* config, unsigned jobs, ek_clip** out) {
    return guarded([&] {
        need_out(out, "out") =
            new ek_clip{echokit::clean_clip(need(clip, "clip").value, from_c(need(config, "config")), jobs)};
    });
}

// ---- echograms

ek_status ek_echogram_build(const ek_clip* clip, const ek_preprocess_config* config, const char* clip_id,
                            unsigned jobs, ek_echogram** out) {
    return guarded([&] {
        need_out(out, "out") = new ek_echogram{echokit::build_echogram(
            need(clip, "clip").value, from_c(need(config, "config")), clip_id ? clip_id : "", jobs)};
    });
}

ek_status ek_echogram_read(const char* path, ek_echogram** out) {
    return guarded([&] { need_out(out, "out") = new ek_echogram{echokit::read_echogram(need_str(path, "path"))}; });
}

ek_status ek_echogram_write(const ek_echogram* echogram, const char* path) {
    return guarded([&] { echokit::write_echogram(need(echogram, "echogram").value, need_str(path, "path")); });
}

void ek_echogram_free(ek_echogram* echogram) { delete echogram; }

ek_status ek_echogram_get_info(const ek_echogram* echogram, ek_echogram_info* out) {
    return guarded([&] {
        const echokit::Echogram& e = need(echogram, "echogram").value;
        need_out(out, "out") = {e.width, e.height, e.x_offset, e.pad_start, e.padded ? 1 : 0};
    });
}

const char* ek_echogram_clip_id(const ek_echogram* echogram) {
    return echogram ? echogram->value.clip_id.c_str() : "";
}

ek_status ek_echogram_set_origin(ek_echogram* echogram, const char* clip_id, uint32_t x_offset) {
    return guarded([&] {
        echokit::Echogram& e = need_out(echogram, "echogram").value;
        e.clip_id = need_str(clip_id, "clip_id");
        e.x_offset = x_offset;
    });
}

ek_status ek_echogram_intensity(const ek_echogram* echogram, const uint8_t** data, size_t* count) {
    return guarded([&] {
        const echokit::Echogram& e = need(echogram, "echogram").value;
        need_out(data, "data") = e.intensity.data();
        need_out(count, "count") = e.intensity.size();
    });
}

ek_status ek_echogram_lateral(const ek_echogram* echogram, double* out, size_t count) {
    return guarded([&] {
        const echokit::Echogram& e = need(echogram, "echogram").value;
        if (!out || count < e.lateral.size())
            echokit::fail(echokit::ErrorCode::Argument,
                          "output buffer needs " + std::to_string(e.lateral.size()) + " doubles");
        for (std::size_t i = 0; i < e.lateral.size(); ++i) out[i] = e.lateral[i].value();
    });
}

ek_status ek_echogram_nonzero_count(const ek_echogram* echogram, size_t* count) {
    return guarded([&] { need_out(count, "count") = need(echogram, "echogram").value.nonzero_count(); });
}

ek_status ek_echogram_slice(const ek_echogram* echogram, uint32_t window, uint32_t stride, ek_echogram*** slices,
                            size_t* count) {
    return guarded([&] {
        auto parts = echokit::slice_echogram(need(echogram, "echogram").value, window, stride);
        auto** array = static_cast<ek_echogram**>(std::calloc(parts.size(), sizeof(ek_echogram*)));
        if (!array && !parts.empty()) throw std::bad_alloc();
        try {
            for (std::size_t i = 0; i < parts.size(); ++i) array[i] = new ek_echogram{std::move(parts[i])};
        } catch (...) {
            ek_echogram_array_free(array, parts.size());
            throw;
        }
        need_out(slices, "slices") = array;
        need_out(count, "count") = parts.size();
    });
}

void ek_echogram_array_free(ek_echogram** slices, size_t count) {
    if (!slices) return;
    for (std::size_t i = 0; i < count; ++i) delete slices[i];
    std::free(slices);
}

ek_status ek_echogram_normalize(const ek_echogram* slice, uint32_t out_height, uint32_t out_width, float* out,
                                size_t count) {
    return guarded([&] {
        const echokit::ModelInput input =
            echokit::normalize_slice(need(slice, "slice").value, out_height, out_width);
        if (!out || count < input.values.size())
            echokit::fail(echokit::ErrorCode::Argument,
                          "output buffer needs " + std::to_string(input.values.size()) + " floats");
        std::copy(input.values.begin(), input.values.end(), out);
    });
}

ek_status ek_echogram_export_png(const ek_echogram* echogram, const char* path) {
    return guarded([&] { echokit::export_png(need(echogram, "echogram").value, need_str(path, "path")); });
}

// ---- augmentation

ek_status ek_augment_parse(const char* name, ek_augment_op* out) {
    return guarded([&] {
        need_out(out, "out") = static_cast<ek_augment_op>(echokit::parse_augment_op(need_str(name, "name")));
    });
}

ek_status ek_echogram_augment(const ek_echogram* slice, ek_augment_op op, ek_echogram** out) {
    return guarded([&] {
        const echokit::LabeledSlice in{need(slice, "slice").value, {}};
        need_out(out, "out") = new ek_echogram{echokit::apply(from_c(op), in).slice};
    });
}

ek_status ek_echogram_superpose(const ek_echogram* a, const ek_echogram* b, ek_echogram** out) {
    return guarded([&] {
        const echokit::LabeledSlice la{need(a, "a").value, {}};
        const echokit::LabeledSlice lb{need(b, "b").value, {}};
        need_out(out, "out") = new ek_echogram{echokit::superpose(la, lb).slice};
    });
}

ek_status ek_labels_augment(const ek_labels* labels, ek_augment_op op, ek_labels** out) {
    return guarded([&] {
        const auto aug = from_c(op);
        auto result = std::make_unique<ek_labels>();
        for (const auto& label : need(labels, "labels").value)
            result->value.push_back(echokit::augment_label(aug, label));
        need_out(out, "out") = result.release();
    });
}

ek_status ek_labels_superpose(const ek_labels* a, const ek_labels* b, ek_labels** out) {
    return guarded([&] {
        const auto& la = need(a, "a").value;
        const auto& lb = need(b, "b").value;
        if (la.size() != lb.size())
            echokit::fail(echokit::ErrorCode::Validation, "superpose: label sets differ in length (" +
                                                              std::to_string(la.size()) + " vs " +
                                                              std::to_string(lb.size()) + ")");
        auto result = std::make_unique<ek_labels>();
        for (std::size_t i = 0; i < la.size(); ++i) result->value.push_back(echokit::superpose_labels(la[i], lb[i]));
        need_out(out, "out") = result.release();
    });
}

// ---- tracks / labels / evaluation

ek_status ek_tracks_read(const char* path, ek_tracks** out) {
    return guarded([&] { need_out(out, "out") = new ek_tracks{echokit::read_tracks(need_str(path, "path"))}; });
}

ek_status ek_tracks_write(const ek_tracks* tracks, const char* path) {
    return guarded([&] { echokit::write_tracks(need(tracks, "tracks").value, need_str(path, "path")); });
}

void ek_tracks_free(ek_tracks* tracks) { delete tracks; }

ek_status ek_tracks_orient(const ek_tracks* tracks, ek_tracks** out) {
    return guarded([&] { need_out(out, "out") = new ek_tracks{echokit::orient(need(tracks, "tracks").value)}; });
}

ek_status ek_tracks_count(const ek_tracks* tracks, uint32_t window, uint32_t total_frames, ek_label_source source,
                          ek_labels** out) {
    return guarded([&] {
        need_out(out, "out") = new ek_labels{
            echokit::tracks_to_counts(need(tracks, "tracks").value, window, total_frames, from_c(source))};
    });
}

ek_status ek_labels_create(ek_labels** out) {
    return guarded([&] { need_out(out, "out") = new ek_labels{}; });
}

ek_status ek_labels_append(ek_labels* labels, const ek_label_view* label) {
    return guarded([&] {
        const ek_label_view& v = need(label, "label");
        need_out(labels, "labels")
            .value.push_back({need_str(v.clip_id, "label.clip_id"), v.x_offset, v.left, v.right, from_c(v.source)});
    });
}

ek_status ek_labels_read(const char* path, ek_labels** out) {
    return guarded([&] { need_out(out, "out") = new ek_labels{echokit::read_labels(need_str(path, "path"))}; });
}

ek_status ek_labels_write(const ek_labels* labels, const char* path) {
    return guarded([&] { echokit::write_labels(need(labels, "labels").value, need_str(path, "path")); });
}

void ek_labels_free(ek_labels* labels) { delete labels; }

size_t ek_labels_size(const ek_labels* labels) { return labels ? labels->value.size() : 0; }

ek_status ek_labels_get(const ek_labels* labels, size_t index, ek_label_view* out) {
    return guarded([&] {
        const auto& all = need(labels, "labels").value;
        if (index >= all.size())
            echokit::fail(echokit::ErrorCode::Index, "label index " + std::to_string(index) + " out of range");
        const echokit::CountLabel& l = all[index];
        need_out(out, "out") = {l.clip_id.c_str(), l.x_offset, l.left, l.right,
                                static_cast<ek_label_source>(l.source)};
    });
}

ek_status ek_predictions_read(const char* path, ek_predictions** out) {
    return guarded(
        [&] { need_out(out, "out") = new ek_predictions{echokit::read_predictions(need_str(path, "path"))}; });
}

ek_status ek_predictions_write(const ek_predictions* predictions, const char* path) {
    return guarded(
        [&] { echokit::write_predictions(need(predictions, "predictions").value, need_str(path, "path")); });
}

ek_status ek_predictions_from_labels(const ek_labels* labels, ek_predictions** out) {
    return guarded([&] {
        auto result = std::make_unique<ek_predictions>();
        for (const auto& l : need(labels, "labels").value)
            result->value.push_back({l.clip_id, l.x_offset, double(l.left), double(l.right)});
        need_out(out, "out") = result.release();
    });
}

void ek_predictions_free(ek_predictions* predictions) { delete predictions; }

size_t ek_predictions_size(const ek_predictions* predictions) {
    return predictions ? predictions->value.size() : 0;
}

ek_status ek_evaluate(const ek_predictions* predictions, const ek_labels* labels, ek_eval_report* out) {
    return guarded([&] {
        const echokit::EvalReport r =
            echokit::nmae(need(predictions, "predictions").value, need(labels, "labels").value);
        ek_eval_report& c = need_out(out, "out");
        c.n_clips = r.n_clips;
        c.total_defined = r.total_nmae.has_value();
        c.left_defined = r.left_nmae.has_value();
        c.right_defined = r.right_nmae.has_value();
        c.total_nmae = r.total_nmae.value_or(0.0);
        c.left_nmae = r.left_nmae.value_or(0.0);
        c.right_nmae = r.right_nmae.value_or(0.0);
        c.total_error = r.total_error;
        c.total_target = r.total_target;
        c.left_error = r.left_error;
        c.left_target = r.left_target;
        c.right_error = r.right_error;
        c.right_target = r.right_target;
    });
}

ek_status ek_eval_report_json(const ek_eval_report* report, char** json) {
    return guarded([&] {
        const ek_eval_report& c = need(report, "report");
        echokit::EvalReport r;
        r.n_clips = c.n_clips;
        if (c.total_defined) r.total_nmae = c.total_nmae;
        if (c.left_defined) r.left_nmae = c.left_nmae;
        if (c.right_defined) r.right_nmae = c.right_nmae;
        r.total_error = c.total_error;
        r.total_target = c.total_target;
        r.left_error = c.left_error;
        r.left_target = c.left_target;
        r.right_error = c.right_error;
        r.right_target = c.right_target;
        need_out(json, "json") = dup_string(echokit::report_to_json(r));
    });
}

// ---- synth

ek_status ek_synth_config_read(const char* path, ek_synth** out) {
    return guarded([&] { need_out(out, "out") = new ek_synth{echokit::read_synth_config(need_str(path, "path"))}; });
}

ek_status ek_synth_suite_config(uint64_t seed, uint32_t index, ek_synth** out) {
    return guarded([&] { need_out(out, "out") = new ek_synth{echokit::suite_config(seed, index)}; });
}

void ek_synth_free(ek_synth* config) { delete config; }

const char* ek_synth_clip_id(const ek_synth* config) { return config ? config->value.clip_id.c_str() : ""; }

ek_status ek_synth_config_text(const ek_synth* config, char** text) {
    return guarded(
        [&] { need_out(text, "text") = dup_string(echokit::synth_config_to_text(need(config, "config").value)); });
}

ek_status ek_synth_run(const ek_synth* config, ek_clip** clip, ek_tracks** tracks, ek_labels** labels) {
    return guarded([&] {
        echokit::SynthResult result = echokit::synth_clip(need(config, "config").value);
        auto c = std::make_unique<ek_clip>(ek_clip{std::move(result.clip)});
        auto t = std::make_unique<ek_tracks>(ek_tracks{std::move(result.tracks)});
        auto l = std::make_unique<ek_labels>(ek_labels{std::move(result.labels)});
        if (clip) *clip = c.release();
        if (tracks) *tracks = t.release();
        if (labels) *labels = l.release();
    });
}

// ---- manifests

ek_status ek_manifest_build(const char* strong_dir, const char* weak_dir, const char* splits_path,
                            ek_manifest** out) {
    return guarded([&] {
        const auto splits = echokit::parse_splits_json(echokit::read_text_file(need_str(splits_path, "splits_path")));
        std::vector<echokit::LabeledSliceRef> strong, weak;
        if (strong_dir) strong = echokit::load_collection(strong_dir, echokit::LabelSource::Strong);
        if (weak_dir) weak = echokit::load_collection(weak_dir, echokit::LabelSource::Weak);
        need_out(out, "out") = new ek_manifest{echokit::build_manifest(strong, weak, splits)};
    });
}

ek_status ek_manifest_read(const char* path, ek_manifest** out) {
    return guarded([&] { need_out(out, "out") = new ek_manifest{echokit::read_manifest(need_str(path, "path"))}; });
}

ek_status ek_manifest_write(const ek_manifest* manifest, const char* path) {
    return guarded([&] { echokit::write_manifest(need(manifest, "manifest").value, need_str(path, "path")); });
}

void ek_manifest_free(ek_manifest* manifest) { delete manifest; }

size_t ek_manifest_size(const ek_manifest* manifest) { return manifest ? manifest->value.size() : 0; }

ek_status ek_manifest_check(const ek_manifest* manifest, int* disjoint, char** report_json) {
    return guarded([&] {
        const auto& m = need(manifest, "manifest").value;
        const echokit::SplitCheck check = echokit::check_split_disjoint(m);
        if (disjoint) *disjoint = check.ok ? 1 : 0;
        if (report_json) *report_json = dup_string(echokit::check_report_json(check, echokit::class_balance(m)));
    });
}

ek_status ek_slice_file_name(const char* clip_id, uint32_t x_offset, char** out) {
    return guarded(
        [&] { need_out(out, "out") = dup_string(echokit::slice_file_name(need_str(clip_id, "clip_id"), x_offset)); });
}

} // extern "C"
