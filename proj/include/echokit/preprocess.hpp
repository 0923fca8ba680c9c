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
#include <vector>

namespace echokit {

/// Two-stage background subtraction parameters. Defaults are the best row of
/// the published echogram parameter sweep (20 / 40 / 60, size 100).
struct PreprocessConfig {
    double alpha0 = 20.0;
    double alpha1 = 40.0;
    double alpha2 = 60.0;
    double size_thresh = 100.0;
    double reference_range = 5.0;
    // Sweep configurations may relax alpha0 < alpha1 < alpha2 to <= (e.g. all zero).
    bool sweep = false;

    void validate() const;
};

/// Table of the four published sweep rows, flagged as sweep configurations.
std::vector<PreprocessConfig> sweep_table_configs(double reference_range = 5.0);

struct ComponentMask {
    std::uint32_t rows = 0;
    std::uint32_t beams = 0;
    /// Component id per pixel, 0 = background; ids are 1..component_count in
    /// raster order of each component's first pixel.
    std::vector<std::uint32_t> labels;
    std::vector<std::uint32_t> kept_ids;
    /// Indexed by id (entry 0 unused).
    std::vector<std::uint32_t> areas;
    std::vector<double> mean_ranges;
    std::vector<bool> kept;

    std::uint32_t component_count() const noexcept {
        return areas.empty() ? 0 : static_cast<std::uint32_t>(areas.size() - 1);
    }
    std::uint32_t label_at(std::uint32_t row, std::uint32_t beam) const {
        return labels[std::size_t(row) * beams + beam];
    }
};

/// Keeps pixels whose residual over the mean exceeds alpha; surviving pixels
/// store round(clamp(residual, 0, 255)).
Frame subtract_background(const FrameView& frame, const MeanFrame& mean, double alpha);

/// 8-connected components over nonzero pixels. A component of area A and mean
/// bin-center range r is kept iff A > size_thresh * reference_range / r.
ComponentMask connected_components(const FrameView& frame, const PreprocessConfig& config,
                                   const ClipHeader& header);

/// Threshold a component of `area` pixels at mean range `mean_range` must exceed.
double scaled_size_threshold(const PreprocessConfig& config, double mean_range);

Clip clean_clip(const Clip& clip, const PreprocessConfig& config, unsigned jobs = 1);

/// Same as clean_clip with a precomputed mean frame.
Clip clean_clip(const Clip& clip, const MeanFrame& mean, const PreprocessConfig& config,
                unsigned jobs = 1);

} // namespace echokit
