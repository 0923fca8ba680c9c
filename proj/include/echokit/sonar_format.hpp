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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace echokit {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

const char* to_string(Side side) noexcept;
Side parse_side(const std::string& text);

struct ClipHeader {
    std::uint32_t frame_count = 1;
    std::uint32_t range_samples = 1;
    std::uint32_t beam_count = 2;
    float frame_rate = 1.0f;
    float window_start = 0.0f;
    float window_end = 1.0f;
    float beam_fov = 30.0f;
    Side upstream_side = Side::Right;

    std::size_t frame_size() const noexcept {
        return std::size_t(range_samples) * beam_count;
    }

    /// Throws a validation error naming the first violated field.
    void validate() const;

    bool operator==(const ClipHeader&) const = default;
};

/// Read-only view of one R x B frame; row = range sample (0 nearest), column = beam.
struct FrameView {
    std::span<const std::uint8_t> samples;
    std::uint32_t rows = 0;
    std::uint32_t beams = 0;

    std::uint8_t at(std::uint32_t row, std::uint32_t beam) const {
        return samples[std::size_t(row) * beams + beam];
    }
};

/// An owned R x B frame, same layout as FrameView.
struct Frame {
    std::uint32_t rows = 0;
    std::uint32_t beams = 0;
    std::vector<std::uint8_t> samples;

    FrameView view() const { return {samples, rows, beams}; }
    std::uint8_t at(std::uint32_t row, std::uint32_t beam) const {
        return samples[std::size_t(row) * beams + beam];
    }
    bool operator==(const Frame&) const = default;
};

/// A chronological stack of frames stored contiguously, range-major, beam fastest.
class Clip {
public:
    Clip() = default;
    Clip(ClipHeader header, std::vector<std::uint8_t> samples);

    const ClipHeader& header() const noexcept { return header_; }
    std::span<const std::uint8_t> samples() const noexcept { return samples_; }
    std::span<std::uint8_t> mutable_samples() noexcept { return samples_; }

    FrameView frame(std::uint32_t t) const;
    std::span<std::uint8_t> mutable_frame(std::uint32_t t);

    bool operator==(const Clip&) const = default;

private:
    ClipHeader header_;
    std::vector<std::uint8_t> samples_;
};

/// Per-pixel mean over all frames of a clip, R x B, row-major.
struct MeanFrame {
    std::uint32_t rows = 0;
    std::uint32_t beams = 0;
    std::vector<double> values;

    double at(std::uint32_t row, std::uint32_t beam) const {
        return values[std::size_t(row) * beams + beam];
    }
};

inline constexpr char kClipMagic[4] = {'S', 'V', 'C', '1'};
inline constexpr std::size_t kClipHeaderBytes = 36;

std::vector<std::uint8_t> encode_clip(const Clip& clip);
Clip decode_clip(std::span<const std::uint8_t> bytes);

Clip read_clip(const std::filesystem::path& path);
void write_clip(const Clip& clip, const std::filesystem::path& path);

MeanFrame mean_frame(const Clip& clip);

/// Bin-center range in meters of a range sample.
double range_of_sample(const ClipHeader& header, std::uint32_t row);

// Shared by every binary format in the toolkit.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace echokit
