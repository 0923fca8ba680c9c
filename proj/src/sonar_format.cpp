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

#include "echokit/sonar_format.hpp"

#include "echokit/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace echokit {

const char* to_string(Side side) noexcept {
    return side == Side::Left ? "left" : "right";
}

Side parse_side(const std::string& text) {
    if (text == "left" || text == "Left") return Side::Left;
    if (text == "right" || text == "Right") return Side::Right;
    fail(ErrorCode::Validation, "upstream_side: expected 'left' or 'right', got '" + text + "'");
}

void ClipHeader::validate() const {
    if (frame_count < 1) fail(ErrorCode::Validation, "frame_count: must be >= 1");
    if (range_samples < 1) fail(ErrorCode::Validation, "range_samples: must be >= 1");
    if (beam_count < 2) fail(ErrorCode::Validation, "beam_count: must be >= 2");
    if (!(window_start >= 0.0f) || !std::isfinite(window_start))
        fail(ErrorCode::Validation, "window_start: must be finite and >= 0");
    if (!(window_end > window_start) || !std::isfinite(window_end))
        fail(ErrorCode::Validation, "window_end: must be finite and > window_start");
    if (!(beam_fov > 0.0f && beam_fov < 180.0f))
        fail(ErrorCode::Validation, "beam_fov: must lie in (0, 180)");
    if (!std::isfinite(frame_rate)) fail(ErrorCode::Validation, "frame_rate: must be finite");
    if (upstream_side != Side::Left && upstream_side != Side::Right)
        fail(ErrorCode::Validation, "upstream_side: must be 0 (left) or 1 (right)");
}

Clip::Clip(ClipHeader header, std::vector<std::uint8_t> samples)
    : header_(header), samples_(std::move(samples)) {
    header_.validate();
    const std::size_t expected = header_.frame_size() * header_.frame_count;
    if (samples_.size() != expected) {
        fail(ErrorCode::Validation,
             "frames: expected " + std::to_string(expected) + " samples (" +
                 std::to_string(header_.frame_count) + " frames of " +
                 std::to_string(header_.range_samples) + "x" + std::to_string(header_.beam_count) +
                 "), got " + std::to_string(samples_.size()));
    }
}

FrameView Clip::frame(std::uint32_t t) const {
    if (t >= header_.frame_count)
        fail(ErrorCode::Index, "frame index " + std::to_string(t) + " out of range");
    const std::size_t n = header_.frame_size();
    return {std::span<const std::uint8_t>(samples_).subspan(t * n, n), header_.range_samples,
            header_.beam_count};
}

std::span<std::uint8_t> Clip::mutable_frame(std::uint32_t t) {
    if (t >= header_.frame_count)
        fail(ErrorCode::Index, "frame index " + std::to_string(t) + " out of range");
    const std::size_t n = header_.frame_size();
    return std::span<std::uint8_t>(samples_).subspan(t * n, n);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    out.insert(out.end(), raw.begin(), raw.end());
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
}

} // namespace

std::vector<std::uint8_t> encode_clip(const Clip& clip) {
    const ClipHeader& h = clip.header();
    h.validate();
    if (clip.samples().size() != h.frame_size() * h.frame_count)
        fail(ErrorCode::Validation, "frames: sample count does not match header dimensions");

    std::vector<std::uint8_t> out;
    out.reserve(kClipHeaderBytes + clip.samples().size());
    out.insert(out.end(), std::begin(kClipMagic), std::end(kClipMagic));
    put(out, h.frame_count);
    put(out, h.range_samples);
    put(out, h.beam_count);
    put(out, h.frame_rate);
    put(out, h.window_start);
    put(out, h.window_end);
    put(out, h.beam_fov);
    out.push_back(static_cast<std::uint8_t>(h.upstream_side));
    out.insert(out.end(), 3, 0);
    out.insert(out.end(), clip.samples().begin(), clip.samples().end());
    return out;
}

Clip decode_clip(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kClipMagic, 4) != 0)
        fail(ErrorCode::Format, "not an SVC1 clip (bad magic)");
    if (bytes.size() < kClipHeaderBytes)
        fail(ErrorCode::Truncation, "SVC1 header truncated");

    ClipHeader h;
    h.frame_count = get<std::uint32_t>(bytes, 4);
    h.range_samples = get<std::uint32_t>(bytes, 8);
    h.beam_count = get<std::uint32_t>(bytes, 12);
    h.frame_rate = get<float>(bytes, 16);
    h.window_start = get<float>(bytes, 20);
    h.window_end = get<float>(bytes, 24);
    h.beam_fov = get<float>(bytes, 28);
    const std::uint8_t side = bytes[32];
    if (side > 1) fail(ErrorCode::Validation, "upstream_side: must be 0 (left) or 1 (right)");
    h.upstream_side = static_cast<Side>(side);
    if (bytes[33] != 0 || bytes[34] != 0 || bytes[35] != 0)
        fail(ErrorCode::Format, "SVC1 reserved bytes must be zero");
    h.validate();

    const std::size_t payload = bytes.size() - kClipHeaderBytes;
    // long double: three u32 factors can overflow a 32-bit size_t.
    const long double want = static_cast<long double>(h.frame_size()) * h.frame_count;
    if (static_cast<long double>(payload) < want) {
        fail(ErrorCode::Truncation,
             "SVC1 payload truncated: expected " + std::to_string(h.frame_size() * h.frame_count) +
                 " bytes, found " + std::to_string(payload));
    }
    if (static_cast<long double>(payload) > want)
        fail(ErrorCode::Format, "SVC1 payload has trailing bytes");

    auto first = bytes.begin() + kClipHeaderBytes;
    return Clip(h, std::vector<std::uint8_t>(first, bytes.end()));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::Io, "read failure on '" + path.string() + "'");
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "write failure on '" + path.string() + "'");
}

Clip read_clip(const std::filesystem::path& path) {
    return decode_clip(read_file_bytes(path));
}

void write_clip(const Clip& clip, const std::filesystem::path& path) {
    write_file_bytes(path, encode_clip(clip));
}

MeanFrame mean_frame(const Clip& clip) {
    const ClipHeader& h = clip.header();
    MeanFrame mean{h.range_samples, h.beam_count, std::vector<double>(h.frame_size(), 0.0)};
    // Integer accumulation is exact up to 2^64 / 255 frames.
    std::vector<std::uint64_t> sums(h.frame_size(), 0);
    const auto samples = clip.samples();
    for (std::uint32_t t = 0; t < h.frame_count; ++t) {
        const std::uint8_t* f = samples.data() + std::size_t(t) * h.frame_size();
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += f[i];
    }
    for (std::size_t i = 0; i < sums.size(); ++i)
        mean.values[i] = static_cast<double>(sums[i]) / h.frame_count;
    return mean;
}

double range_of_sample(const ClipHeader& header, std::uint32_t row) {
    if (row >= header.range_samples)
        fail(ErrorCode::Index, "range row " + std::to_string(row) + " out of range [0, " +
                                   std::to_string(header.range_samples) + ")");
    const double start = header.window_start;
    const double span = double(header.window_end) - start;
    return start + (row + 0.5) * span / header.range_samples;
}

} // namespace echokit
