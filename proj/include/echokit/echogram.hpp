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

#include "echokit/preprocess.hpp"
#include "echokit/sonar_format.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace echokit {

/// Normalized lateral position in [0, 1], held as an exact ratio num/den so
/// that mirroring (v -> 1 - v) is an exact involution. Compares by value.
struct Lateral {
    std::uint32_t num = 0;
    std::uint32_t den = 1;

    static Lateral from_beam(std::uint32_t beam, std::uint32_t beam_count) {
        return {beam, beam_count - 1};
    }
    static Lateral from_byte(std::uint8_t q) { return {q, 255}; }

    double value() const noexcept { return double(num) / double(den); }
    Lateral inverted() const noexcept { return {den - num, den}; }
    std::uint8_t quantized() const noexcept;

    friend bool operator==(const Lateral& a, const Lateral& b) noexcept {
        return std::uint64_t(a.num) * b.den == std::uint64_t(b.num) * a.den;
    }
};

/// Two-channel echogram: rows are range samples, columns are frames.
/// Also used for fixed-width slices (x_offset > 0 or padded), since a slice
/// carries exactly the same planes.
struct Echogram {
    std::string clip_id;
    PreprocessConfig source_config;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> intensity; // height x width, row-major
    std::vector<Lateral> lateral;        // height x width, row-major
    std::uint32_t x_offset = 0;
    bool padded = false;
    std::uint32_t pad_start = 0;

    Echogram() = default;
    Echogram(std::uint32_t width, std::uint32_t height);

    std::size_t index(std::uint32_t row, std::uint32_t col) const noexcept {
        return std::size_t(row) * width + col;
    }
    std::uint8_t intensity_at(std::uint32_t row, std::uint32_t col) const {
        return intensity[index(row, col)];
    }
    const Lateral& lateral_at(std::uint32_t row, std::uint32_t col) const {
        return lateral[index(row, col)];
    }
    std::size_t nonzero_count() const noexcept;

    /// Throws a validation error if lateral is out of [0, 1] or nonzero where
    /// intensity is zero, or plane sizes mismatch.
    void validate() const;

    /// Pixel planes and geometry only (ids and configs are metadata).
    bool same_pixels(const Echogram& other) const;
};

using EchogramSlice = Echogram;

struct EchogramColumn {
    std::vector<std::uint8_t> intensity;
    std::vector<Lateral> lateral;
};

EchogramColumn collapse_frame(const FrameView& frame);

/// Echogram of an already-cleaned clip (no background subtraction).
Echogram echogram_from_clean(const Clip& cleaned, std::string clip_id = {},
                             const PreprocessConfig& config = {}, unsigned jobs = 1);

Echogram build_echogram(const Clip& clip, const PreprocessConfig& config, std::string clip_id = {},
                        unsigned jobs = 1);

std::vector<EchogramSlice> slice_echogram(const Echogram& echogram, std::uint32_t window = 200,
                                          std::uint32_t stride = 200);

struct ModelInput {
    static constexpr std::uint32_t kHeight = 200;
    static constexpr std::uint32_t kWidth = 800;

    std::uint32_t height = kHeight;
    std::uint32_t width = kWidth;
    /// Channel-major: [channel][row][col], channel 0 intensity, 1 lateral.
    std::vector<float> values;

    float at(int channel, std::uint32_t row, std::uint32_t col) const {
        return values[(std::size_t(channel) * height + row) * width + col];
    }
};

/// Scales both channels to [0, 1], applies v -> (v - 0.5) / 0.25, then
/// bilinearly resizes each channel so that range maps to height and time to width.
ModelInput normalize_slice(const EchogramSlice& slice, std::uint32_t out_height = ModelInput::kHeight,
                           std::uint32_t out_width = ModelInput::kWidth);

/// Half-pixel-centre bilinear resize of one row-major channel.
std::vector<float> resize_bilinear(std::span<const float> src, std::uint32_t src_h, std::uint32_t src_w,
                                   std::uint32_t dst_h, std::uint32_t dst_w);

inline constexpr char kEchogramMagic[4] = {'E', 'C', 'G', '1'};
inline constexpr std::size_t kEchogramHeaderBytes = 17;

std::vector<std::uint8_t> encode_echogram(const Echogram& echogram);
Echogram decode_echogram(std::span<const std::uint8_t> bytes);
Echogram read_echogram(const std::filesystem::path& path);
void write_echogram(const Echogram& echogram, const std::filesystem::path& path);

/// Debug rendering: hue from lateral position, brightness from intensity.
void export_png(const Echogram& echogram, const std::filesystem::path& path);

} // namespace echokit
