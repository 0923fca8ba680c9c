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

#include "echokit/preprocess.hpp"

#include "echokit/error.hpp"
#include "echokit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace echokit {

void PreprocessConfig::validate() const {
    auto in_range = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 255.0; };
    if (!in_range(alpha0)) fail(ErrorCode::Validation, "alpha0: must lie in [0, 255]");
    if (!in_range(alpha1)) fail(ErrorCode::Validation, "alpha1: must lie in [0, 255]");
    if (!in_range(alpha2)) fail(ErrorCode::Validation, "alpha2: must lie in [0, 255]");
    if (!sweep) {
        if (!(alpha0 < alpha1)) {
            std::ostringstream msg;
            msg << "alpha0 < alpha1 violated (alpha0=" << alpha0 << ", alpha1=" << alpha1 << ")";
            fail(ErrorCode::Validation, msg.str());
        }
        if (!(alpha1 < alpha2)) {
            std::ostringstream msg;
            msg << "alpha1 < alpha2 violated (alpha1=" << alpha1 << ", alpha2=" << alpha2 << ")";
            fail(ErrorCode::Validation, msg.str());
        }
    }
    if (!std::isfinite(size_thresh) || size_thresh < 0.0)
        fail(ErrorCode::Validation, "size_thresh: must be finite and >= 0");
    if (!std::isfinite(reference_range) || !(reference_range > 0.0))
        fail(ErrorCode::Validation, "reference_range: must be finite and > 0");
}

std::vector<PreprocessConfig> sweep_table_configs(double reference_range) {
    return {
        {0, 0, 0, 0, reference_range, true},
        {20, 0, 0, 0, reference_range, true},
        {20, 40, 60, 100, reference_range, true},
        {20, 40, 100, 120, reference_range, true},
    };
}

namespace {

void require_same_shape(const FrameView& frame, const MeanFrame& mean) {
    if (frame.rows != mean.rows || frame.beams != mean.beams ||
        frame.samples.size() != mean.values.size()) {
        fail(ErrorCode::Validation, "frame is " + std::to_string(frame.rows) + "x" +
                                        std::to_string(frame.beams) + " but mean frame is " +
                                        std::to_string(mean.rows) + "x" + std::to_string(mean.beams));
    }
}

std::uint8_t residual_value(double residual) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(residual, 0.0, 255.0)));
}

// Union-find over provisional labels with path halving.
class DisjointSet {
public:
    std::uint32_t make() {
        parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
        return parent_.back();
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent_[b] = a;
        else parent_[a] = b;
    }

private:
    std::vector<std::uint32_t> parent_;
};

} // namespace

Frame subtract_background(const FrameView& frame, const MeanFrame& mean, double alpha) {
    require_same_shape(frame, mean);
    Frame out{frame.rows, frame.beams, std::vector<std::uint8_t>(frame.samples.size(), 0)};
    for (std::size_t i = 0; i < frame.samples.size(); ++i) {
        const double residual = double(frame.samples[i]) - mean.values[i];
        if (residual > alpha) out.samples[i] = residual_value(residual);
    }
    return out;
}

double scaled_size_threshold(const PreprocessConfig& config, double mean_range) {
    return config.size_thresh * (config.reference_range / mean_range);
}

ComponentMask connected_components(const FrameView& frame, const PreprocessConfig& config,
                                   const ClipHeader& header) {
    const std::uint32_t rows = frame.rows;
    const std::uint32_t beams = frame.beams;
    if (rows != header.range_samples || beams != header.beam_count)
        fail(ErrorCode::Validation, "frame dimensions do not match clip header");

    ComponentMask mask;
    mask.rows = rows;
    mask.beams = beams;
    mask.labels.assign(frame.samples.size(), 0);

    // First pass: provisional labels from the already-visited half of the
    // 8-neighbourhood (W, NW, N, NE).
    DisjointSet sets;
    sets.make(); // provisional 0 = background
    auto idx = [beams](std::uint32_t r, std::uint32_t b) { return std::size_t(r) * beams + b; };
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t b = 0; b < beams; ++b) {
            if (frame.samples[idx(r, b)] == 0) continue;
            std::uint32_t label = 0;
            auto visit = [&](std::uint32_t nr, std::uint32_t nb) {
                const std::uint32_t n = mask.labels[idx(nr, nb)];
                if (n == 0) return;
                if (label == 0) label = n;
                else sets.unite(label, n);
            };
            if (b > 0) visit(r, b - 1);
            if (r > 0) {
                if (b > 0) visit(r - 1, b - 1);
                visit(r - 1, b);
                if (b + 1 < beams) visit(r - 1, b + 1);
            }
            mask.labels[idx(r, b)] = label == 0 ? sets.make() : label;
        }
    }

    // Second pass: compact roots into 1..n in raster order, gather statistics.
    std::vector<std::uint32_t> final_id;
    std::vector<std::uint64_t> row_sums(1, 0);
    mask.areas.assign(1, 0);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t b = 0; b < beams; ++b) {
            std::uint32_t& label = mask.labels[idx(r, b)];
            if (label == 0) continue;
            const std::uint32_t root = sets.find(label);
            if (root >= final_id.size()) final_id.resize(root + 1, 0);
            if (final_id[root] == 0) {
                final_id[root] = static_cast<std::uint32_t>(mask.areas.size());
                mask.areas.push_back(0);
                row_sums.push_back(0);
            }
            label = final_id[root];
            ++mask.areas[label];
            row_sums[label] += r;
        }
    }

    const double start = header.window_start;
    const double bin = (double(header.window_end) - start) / header.range_samples;
    mask.mean_ranges.assign(mask.areas.size(), 0.0);
    mask.kept.assign(mask.areas.size(), false);
    for (std::uint32_t id = 1; id < mask.areas.size(); ++id) {
        const double area = mask.areas[id];
        const double mean_row = double(row_sums[id]) / area;
        const double mean_range = start + (mean_row + 0.5) * bin;
        mask.mean_ranges[id] = mean_range;
        if (area > scaled_size_threshold(config, mean_range)) {
            mask.kept[id] = true;
            mask.kept_ids.push_back(id);
        }
    }
    return mask;
}

Clip clean_clip(const Clip& clip, const PreprocessConfig& config, unsigned jobs) {
    config.validate();
    return clean_clip(clip, mean_frame(clip), config, jobs);
}

Clip clean_clip(const Clip& clip, const MeanFrame& mean, const PreprocessConfig& config,
                unsigned jobs) {
    config.validate();
    const ClipHeader& header = clip.header();
    std::vector<std::uint8_t> out(clip.samples().size(), 0);
    const std::size_t frame_size = header.frame_size();

    parallel_for(header.frame_count, jobs, [&](std::size_t t) {
        const FrameView frame = clip.frame(static_cast<std::uint32_t>(t));
        const Frame stage0 = subtract_background(frame, mean, config.alpha0);
        const ComponentMask mask = connected_components(stage0.view(), config, header);
        std::uint8_t* dst = out.data() + t * frame_size;
        for (std::size_t i = 0; i < frame_size; ++i) {
            if (stage0.samples[i] == 0) continue;
            const double residual = double(frame.samples[i]) - mean.values[i];
            const std::uint32_t id = mask.labels[i];
            const double alpha = mask.kept[id] ? config.alpha1 : config.alpha2;
            if (residual > alpha) dst[i] = stage0.samples[i];
        }
    });
    return Clip(header, std::move(out));
}

} // namespace echokit
