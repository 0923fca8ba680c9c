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

#include "echokit/counts.hpp"
#include "echokit/sonar_format.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace echokit {

/// One fish moving linearly across the polar grid, rendered as an
/// anisotropic Gaussian blob.
struct SynthFish {
    std::uint32_t entry_frame = 0;
    double speed = 0.0;       // beams per frame, positive = rightward in raw image coordinates
    double entry_beam = 0.0;
    double range_row = 0.0;
    double range_drift = 0.0; // rows per frame
    double peak_intensity = 200.0;
    double blob_sigma_rows = 1.5;
    double blob_sigma_beams = 1.0;

    double beam_at(std::uint32_t frame) const { return entry_beam + speed * (double(frame) - entry_frame); }
    double row_at(std::uint32_t frame) const { return range_row + range_drift * (double(frame) - entry_frame); }
};

struct SynthConfig {
    std::string clip_id = "synth";
    ClipHeader header;
    std::vector<SynthFish> fish;
    double background_level = 20.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t window = 200;

    void validate() const;
};

struct SynthResult {
    Clip clip;
    TrackSet tracks; // raw image coordinates, header's upstream side
    std::vector<CountLabel> labels;
};

SynthResult synth_clip(const SynthConfig& config);

/// Scenario `index` of the suite seeded by `seed`; independent of suite size.
SynthConfig suite_config(std::uint64_t seed, std::uint32_t index);

std::vector<SynthResult> synth_suite(std::uint32_t n_clips, std::uint64_t seed, unsigned jobs = 1);

/// Plain-text `key = value` config; `fish = entry_frame speed entry_beam
/// range_row range_drift peak sigma_rows sigma_beams` may repeat.
SynthConfig parse_synth_config(const std::string& text);
SynthConfig read_synth_config(const std::filesystem::path& path);
std::string synth_config_to_text(const SynthConfig& config);

} // namespace echokit
