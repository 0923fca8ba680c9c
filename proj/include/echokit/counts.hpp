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

#pragma once

#include "echokit/sonar_format.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace echokit {

enum class LabelSource { Strong, Weak, Synthetic };

const char* to_string(LabelSource source) noexcept;
LabelSource parse_label_source(const std::string& text);

struct TrackPoint {
    std::uint32_t frame = 0;
    double x = 0.0; // normalized lateral position
    double y = 0.0; // normalized range position
    bool operator==(const TrackPoint&) const = default;
};

struct Track {
    std::string id;
    std::vector<TrackPoint> points;
    bool operator==(const Track&) const = default;
};

struct TrackSet {
    std::string clip_id;
    Side upstream_side = Side::Right;
    std::vector<Track> tracks;
    /// Warnings attached by producers (e.g. a synthetic fish never in view).
    std::vector<std::string> notes;

    void validate() const;
    bool operator==(const TrackSet&) const = default;
};

struct CountLabel {
    std::string clip_id;
    std::uint32_t x_offset = 0;
    std::uint32_t left = 0;  // downstream after orientation
    std::uint32_t right = 0; // upstream after orientation
    LabelSource source = LabelSource::Weak;

    std::uint32_t total() const noexcept { return left + right; }
    bool operator==(const CountLabel&) const = default;
};

struct Prediction {
    std::string clip_id;
    std::uint32_t x_offset = 0;
    double left_pred = 0.0;
    double right_pred = 0.0;
    bool operator==(const Prediction&) const = default;
};

struct EvalReport {
    std::size_t n_clips = 0;
    /// Empty when the corresponding target sum is zero.
    std::optional<double> total_nmae;
    std::optional<double> left_nmae;
    std::optional<double> right_nmae;
    double total_error = 0.0;
    double total_target = 0.0;
    double left_error = 0.0;
    double left_target = 0.0;
    double right_error = 0.0;
    double right_target = 0.0;
};

enum class Direction { None, Left, Right };

/// Mirrors x when upstream is on the left so that rightward motion is upstream.
TrackSet orient(TrackSet tracks);

/// x -> 1 - x on every point and upstream_side toggled: the same scene seen in a mirror.
TrackSet mirror(TrackSet tracks);

/// Start/end rule about the vertical centre line, strict on both sides.
Direction classify(const Track& track);

/// Interpolated frame at which the track first reaches x = 0.5, if ever.
std::optional<double> crossing_frame(const Track& track);

/// Per-window counts over [0, total_frames) tiled by `window`. Each counted
/// track lands in the window holding its first centre crossing.
std::vector<CountLabel> tracks_to_counts(const TrackSet& tracks, std::uint32_t window,
                                         std::uint32_t total_frames,
                                         LabelSource source = LabelSource::Weak);

EvalReport nmae(std::span<const Prediction> predictions, std::span<const CountLabel> labels);

std::string window_key(const std::string& clip_id, std::uint32_t x_offset);

// Tracks JSON, labels / predictions JSONL, report JSON.
TrackSet parse_tracks_json(const std::string& text);
std::string tracks_to_json(const TrackSet& tracks);
TrackSet read_tracks(const std::filesystem::path& path);
void write_tracks(const TrackSet& tracks, const std::filesystem::path& path);

/// Records without a "source" field get `fallback`.
std::vector<CountLabel> parse_labels_jsonl(const std::string& text,
                                           LabelSource fallback = LabelSource::Weak);
std::string labels_to_jsonl(std::span<const CountLabel> labels);
std::vector<CountLabel> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const CountLabel> labels, const std::filesystem::path& path);

std::vector<Prediction> parse_predictions_jsonl(const std::string& text);
std::string predictions_to_jsonl(std::span<const Prediction> predictions);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace echokit
