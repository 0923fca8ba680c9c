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

#include "echokit/counts.hpp"

#include "echokit/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace echokit {

using nlohmann::json;

const char* to_string(LabelSource source) noexcept {
    switch (source) {
    case LabelSource::Strong: return "strong";
    case LabelSource::Weak: return "weak";
    case LabelSource::Synthetic: return "synthetic";
    }
    return "weak";
}

LabelSource parse_label_source(const std::string& text) {
    if (text == "strong" || text == "Strong") return LabelSource::Strong;
    if (text == "weak" || text == "Weak") return LabelSource::Weak;
    if (text == "synthetic" || text == "Synthetic") return LabelSource::Synthetic;
    fail(ErrorCode::Validation, "source: expected strong|weak|synthetic, got '" + text + "'");
}

void TrackSet::validate() const {
    std::set<std::string> ids;
    for (const Track& track : tracks) {
        if (!ids.insert(track.id).second)
            fail(ErrorCode::Validation, "duplicate track id '" + track.id + "'");
        if (track.points.empty())
            fail(ErrorCode::Validation, "track '" + track.id + "' has no points");
        for (std::size_t i = 0; i < track.points.size(); ++i) {
            const TrackPoint& p = track.points[i];
            if (i > 0 && p.frame <= track.points[i - 1].frame)
                fail(ErrorCode::Validation, "track '" + track.id + "': frames must be strictly increasing");
            if (!(p.x >= 0.0 && p.x <= 1.0) || !(p.y >= 0.0 && p.y <= 1.0))
                fail(ErrorCode::Validation, "track '" + track.id + "': x and y must lie in [0, 1]");
        }
    }
}

TrackSet mirror(TrackSet tracks) {
    for (Track& track : tracks.tracks)
        for (TrackPoint& p : track.points) p.x = 1.0 - p.x;
    tracks.upstream_side = tracks.upstream_side == Side::Left ? Side::Right : Side::Left;
    return tracks;
}

TrackSet orient(TrackSet tracks) {
    if (tracks.upstream_side == Side::Left) return mirror(std::move(tracks));
    return tracks;
}

Direction classify(const Track& track) {
    if (track.points.empty()) return Direction::None;
    const double start = track.points.front().x;
    const double end = track.points.back().x;
    if (start < 0.5 && end > 0.5) return Direction::Right;
    if (start > 0.5 && end < 0.5) return Direction::Left;
    return Direction::None;
}

std::optional<double> crossing_frame(const Track& track) {
    const auto& pts = track.points;
    if (pts.empty()) return std::nullopt;
    if (pts.front().x == 0.5) return double(pts.front().frame);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const TrackPoint& a = pts[i];
        const TrackPoint& b = pts[i + 1];
        const bool crosses = (a.x < 0.5 && b.x >= 0.5) || (a.x > 0.5 && b.x <= 0.5);
        if (!crosses) continue;
        const double t = (0.5 - a.x) / (b.x - a.x);
        return a.frame + t * (double(b.frame) - a.frame);
    }
    return std::nullopt;
}

std::vector<CountLabel> tracks_to_counts(const TrackSet& tracks, std::uint32_t window,
                                         std::uint32_t total_frames, LabelSource source) {
    if (tracks.upstream_side != Side::Right)
        fail(ErrorCode::Precondition, "track set for clip '" + tracks.clip_id +
                                          "' is not oriented (upstream side must be right)");
    if (window < 1) fail(ErrorCode::Argument, "window must be >= 1");
    if (total_frames < 1) fail(ErrorCode::Argument, "total frame count must be >= 1");
    tracks.validate();

    const std::uint32_t n_windows = (total_frames + window - 1) / window;
    std::vector<CountLabel> labels(n_windows);
    for (std::uint32_t w = 0; w < n_windows; ++w) {
        labels[w].clip_id = tracks.clip_id;
        labels[w].x_offset = w * window;
        labels[w].source = source;
    }
    for (const Track& track : tracks.tracks) {
        if (track.points.back().frame >= total_frames)
            fail(ErrorCode::Precondition, "track '" + track.id + "' extends past frame " +
                                              std::to_string(total_frames - 1));
        const Direction dir = classify(track);
        if (dir == Direction::None) continue;
        const double crossing = *crossing_frame(track);
        const auto w = static_cast<std::uint32_t>(std::floor(crossing / window));
        if (dir == Direction::Right) ++labels[w].right;
        else ++labels[w].left;
    }
    return labels;
}

std::string window_key(const std::string& clip_id, std::uint32_t x_offset) {
    return clip_id + "@" + std::to_string(x_offset);
}

EvalReport nmae(std::span<const Prediction> predictions, std::span<const CountLabel> labels) {
    std::map<std::string, const Prediction*> by_key;
    for (const Prediction& p : predictions) {
        const std::string key = window_key(p.clip_id, p.x_offset);
        if (!(std::isfinite(p.left_pred) && std::isfinite(p.right_pred)) || p.left_pred < 0.0 ||
            p.right_pred < 0.0)
            fail(ErrorCode::Validation, "prediction " + key + " must be finite and non-negative");
        if (!by_key.emplace(key, &p).second)
            fail(ErrorCode::Join, "duplicate prediction for " + key);
    }

    EvalReport report;
    std::set<std::string> seen;
    for (const CountLabel& label : labels) {
        const std::string key = window_key(label.clip_id, label.x_offset);
        if (!seen.insert(key).second) fail(ErrorCode::Join, "duplicate label for " + key);
        const auto it = by_key.find(key);
        if (it == by_key.end()) fail(ErrorCode::Join, "missing prediction for " + key);
        const Prediction& p = *it->second;
        const double left_err = std::fabs(p.left_pred - label.left);
        const double right_err = std::fabs(p.right_pred - label.right);
        report.left_error += left_err;
        report.right_error += right_err;
        report.total_error += left_err + right_err;
        report.left_target += label.left;
        report.right_target += label.right;
        report.total_target += label.total();
        ++report.n_clips;
    }
    for (const auto& [key, p] : by_key)
        if (!seen.contains(key)) fail(ErrorCode::Join, "prediction " + key + " has no label");

    auto ratio = [](double num, double den) -> std::optional<double> {
        if (den == 0.0) return std::nullopt;
        return num / den;
    };
    report.total_nmae = ratio(report.total_error, report.total_target);
    report.left_nmae = ratio(report.left_error, report.left_target);
    report.right_nmae = ratio(report.right_error, report.right_target);
    return report;
}

// ---------------------------------------------------------------------------
// JSON formats

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail(ErrorCode::Io, "write failure on '" + path.string() + "'");
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, what + ": " + e.what());
    }
}

template <typename Fn>
void for_each_line(const std::string& text, const std::string& what, Fn&& fn) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = what + " line " + std::to_string(number);
        try {
            fn(parse_json(line, where));
        } catch (const json::exception& e) {
            fail(ErrorCode::Format, where + ": " + e.what());
        }
    }
}

std::uint32_t get_count(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
        v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorCode::Validation, std::string(key) + ": expected a non-negative integer");
    return v.get<std::uint32_t>();
}

} // namespace

TrackSet parse_tracks_json(const std::string& text) {
    const json j = parse_json(text, "tracks JSON");
    TrackSet tracks;
    try {
        tracks.clip_id = j.at("clip_id").get<std::string>();
        tracks.upstream_side = parse_side(j.at("upstream_side").get<std::string>());
        for (const json& jt : j.at("tracks")) {
            Track track;
            const json& id = jt.at("id");
            track.id = id.is_string() ? id.get<std::string>() : id.dump();
            for (const json& jp : jt.at("points"))
                track.points.push_back({get_count(jp, "frame"), jp.at("x").get<double>(),
                                        jp.at("y").get<double>()});
            tracks.tracks.push_back(std::move(track));
        }
        if (j.contains("notes"))
            for (const json& n : j.at("notes")) tracks.notes.push_back(n.get<std::string>());
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, std::string("tracks JSON: ") + e.what());
    }
    tracks.validate();
    return tracks;
}

std::string tracks_to_json(const TrackSet& tracks) {
    json j;
    j["clip_id"] = tracks.clip_id;
    j["upstream_side"] = to_string(tracks.upstream_side);
    j["tracks"] = json::array();
    for (const Track& track : tracks.tracks) {
        json jt;
        jt["id"] = track.id;
        jt["points"] = json::array();
        for (const TrackPoint& p : track.points)
            jt["points"].push_back({{"frame", p.frame}, {"x", p.x}, {"y", p.y}});
        j["tracks"].push_back(std::move(jt));
    }
    if (!tracks.notes.empty()) j["notes"] = tracks.notes;
    return j.dump() + "\n";
}

TrackSet read_tracks(const std::filesystem::path& path) {
    return parse_tracks_json(read_text_file(path));
}

void write_tracks(const TrackSet& tracks, const std::filesystem::path& path) {
    write_text_file(path, tracks_to_json(tracks));
}

std::vector<CountLabel> parse_labels_jsonl(const std::string& text, LabelSource fallback) {
    std::vector<CountLabel> labels;
    for_each_line(text, "labels JSONL", [&](const json& j) {
        CountLabel label;
        label.clip_id = j.at("clip_id").get<std::string>();
        label.x_offset = get_count(j, "x_offset");
        label.left = get_count(j, "left");
        label.right = get_count(j, "right");
        label.source = j.contains("source") ? parse_label_source(j.at("source").get<std::string>())
                                            : fallback;
        labels.push_back(std::move(label));
    });
    return labels;
}

std::string labels_to_jsonl(std::span<const CountLabel> labels) {
    std::string out;
    for (const CountLabel& l : labels) {
        json j = {{"clip_id", l.clip_id}, {"x_offset", l.x_offset}, {"left", l.left},
                  {"right", l.right},     {"source", to_string(l.source)}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<CountLabel> read_labels(const std::filesystem::path& path) {
    return parse_labels_jsonl(read_text_file(path));
}

void write_labels(std::span<const CountLabel> labels, const std::filesystem::path& path) {
    write_text_file(path, labels_to_jsonl(labels));
}

std::vector<Prediction> parse_predictions_jsonl(const std::string& text) {
    std::vector<Prediction> predictions;
    for_each_line(text, "predictions JSONL", [&](const json& j) {
        Prediction p;
        p.clip_id = j.at("clip_id").get<std::string>();
        p.x_offset = get_count(j, "x_offset");
        p.left_pred = j.at("left_pred").get<double>();
        p.right_pred = j.at("right_pred").get<double>();
        predictions.push_back(std::move(p));
    });
    return predictions;
}

std::string predictions_to_jsonl(std::span<const Prediction> predictions) {
    std::string out;
    for (const Prediction& p : predictions) {
        json j = {{"clip_id", p.clip_id},
                  {"x_offset", p.x_offset},
                  {"left_pred", p.left_pred},
                  {"right_pred", p.right_pred}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    return parse_predictions_jsonl(read_text_file(path));
}

void write_predictions(std::span<const Prediction> predictions, const std::filesystem::path& path) {
    write_text_file(path, predictions_to_jsonl(predictions));
}

std::string report_to_json(const EvalReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j = {{"n_clips", report.n_clips},
              {"total_nmae", opt(report.total_nmae)},
              {"left_nmae", opt(report.left_nmae)},
              {"right_nmae", opt(report.right_nmae)},
              {"total_error", report.total_error},
              {"total_target", report.total_target},
              {"left_error", report.left_error},
              {"left_target", report.left_target},
              {"right_error", report.right_error},
              {"right_target", report.right_target}};
    return j.dump(2) + "\n";
}

} // namespace echokit
