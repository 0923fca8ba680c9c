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

#include "echokit/echogram.hpp"

#include "echokit/error.hpp"
#include "echokit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace echokit {

std::uint8_t Lateral::quantized() const noexcept {
    // round-half-up of 255 * num / den in integers
    const std::uint64_t scaled = std::uint64_t(num) * 255 * 2 + den;
    return static_cast<std::uint8_t>(scaled / (std::uint64_t(den) * 2));
}

Echogram::Echogram(std::uint32_t w, std::uint32_t h)
    : width(w), height(h), intensity(std::size_t(w) * h, 0), lateral(std::size_t(w) * h) {}

std::size_t Echogram::nonzero_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(intensity.begin(), intensity.end(), [](std::uint8_t v) { return v != 0; }));
}

void Echogram::validate() const {
    const std::size_t n = std::size_t(width) * height;
    if (intensity.size() != n || lateral.size() != n)
        fail(ErrorCode::Validation, "echogram planes do not match " + std::to_string(height) + "x" +
                                        std::to_string(width));
    if (padded && pad_start > width)
        fail(ErrorCode::Validation, "pad_start beyond echogram width");
    for (std::size_t i = 0; i < n; ++i) {
        const Lateral& l = lateral[i];
        if (l.den == 0 || l.num > l.den)
            fail(ErrorCode::Validation, "lateral value outside [0, 1]");
        if (intensity[i] == 0 && l.num != 0)
            fail(ErrorCode::Validation, "lateral must be 0 where intensity is 0");
    }
}

bool Echogram::same_pixels(const Echogram& other) const {
    return width == other.width && height == other.height && intensity == other.intensity &&
           lateral == other.lateral;
}

EchogramColumn collapse_frame(const FrameView& frame) {
    if (frame.beams < 2)
        fail(ErrorCode::Validation, "beam_count: lateral normalization needs at least 2 beams");
    EchogramColumn column{std::vector<std::uint8_t>(frame.rows, 0),
                          std::vector<Lateral>(frame.rows)};
    for (std::uint32_t r = 0; r < frame.rows; ++r) {
        const std::uint8_t* row = frame.samples.data() + std::size_t(r) * frame.beams;
        // max_element returns the first maximum: smallest-index tie-break.
        const std::uint8_t* best = std::max_element(row, row + frame.beams);
        column.intensity[r] = *best;
        if (*best != 0)
            column.lateral[r] =
                Lateral::from_beam(static_cast<std::uint32_t>(best - row), frame.beams);
    }
    return column;
}

Echogram echogram_from_clean(const Clip& cleaned, std::string clip_id,
                             const PreprocessConfig& config, unsigned jobs) {
    const ClipHeader& h = cleaned.header();
    Echogram echogram(h.frame_count, h.range_samples);
    echogram.clip_id = std::move(clip_id);
    echogram.source_config = config;
    parallel_for(h.frame_count, jobs, [&](std::size_t t) {
        const auto col = static_cast<std::uint32_t>(t);
        const EchogramColumn column = collapse_frame(cleaned.frame(col));
        for (std::uint32_t r = 0; r < h.range_samples; ++r) {
            echogram.intensity[echogram.index(r, col)] = column.intensity[r];
            echogram.lateral[echogram.index(r, col)] = column.lateral[r];
        }
    });
    return echogram;
}

Echogram build_echogram(const Clip& clip, const PreprocessConfig& config, std::string clip_id,
                        unsigned jobs) {
    return echogram_from_clean(clean_clip(clip, config, jobs), std::move(clip_id), config, jobs);
}

namespace {

EchogramSlice cut(const Echogram& e, std::uint32_t offset, std::uint32_t window) {
    EchogramSlice slice(window, e.height);
    slice.clip_id = e.clip_id;
    slice.source_config = e.source_config;
    slice.x_offset = e.x_offset + offset;
    const std::uint32_t available = std::min(window, e.width - offset);
    for (std::uint32_t r = 0; r < e.height; ++r) {
        for (std::uint32_t c = 0; c < available; ++c) {
            slice.intensity[slice.index(r, c)] = e.intensity_at(r, offset + c);
            slice.lateral[slice.index(r, c)] = e.lateral_at(r, offset + c);
        }
    }
    if (available < window) {
        slice.padded = true;
        slice.pad_start = available;
    } else if (e.padded && e.pad_start < offset + window) {
        // Window reaches into the parent's own padding.
        slice.padded = true;
        slice.pad_start = e.pad_start > offset ? e.pad_start - offset : 0;
    }
    return slice;
}

} // namespace

std::vector<EchogramSlice> slice_echogram(const Echogram& echogram, std::uint32_t window,
                                          std::uint32_t stride) {
    if (window < 1) fail(ErrorCode::Argument, "window must be >= 1");
    if (stride < 1) fail(ErrorCode::Argument, "stride must be >= 1");
    std::vector<EchogramSlice> slices;
    std::uint64_t offset = 0;
    for (; offset + window <= echogram.width; offset += stride)
        slices.push_back(cut(echogram, static_cast<std::uint32_t>(offset), window));
    if (offset < echogram.width || (echogram.width == 0 && slices.empty()))
        slices.push_back(cut(echogram, static_cast<std::uint32_t>(offset), window));
    return slices;
}

std::vector<float> resize_bilinear(std::span<const float> src, std::uint32_t src_h, std::uint32_t src_w,
                                   std::uint32_t dst_h, std::uint32_t dst_w) {
    if (src.size() != std::size_t(src_h) * src_w || src_h == 0 || src_w == 0 || dst_h == 0 || dst_w == 0)
        fail(ErrorCode::Argument, "resize_bilinear: bad dimensions");
    struct Tap {
        std::uint32_t lo, hi;
        double frac;
    };
    auto taps = [](std::uint32_t src_n, std::uint32_t dst_n) {
        std::vector<Tap> out(dst_n);
        const double scale = double(src_n) / dst_n;
        for (std::uint32_t i = 0; i < dst_n; ++i) {
            double pos = (i + 0.5) * scale - 0.5;
            pos = std::clamp(pos, 0.0, double(src_n - 1));
            const auto lo = static_cast<std::uint32_t>(std::floor(pos));
            const std::uint32_t hi = std::min(lo + 1, src_n - 1);
            out[i] = {lo, hi, pos - lo};
        }
        return out;
    };
    const auto ty = taps(src_h, dst_h);
    const auto tx = taps(src_w, dst_w);
    std::vector<float> dst(std::size_t(dst_h) * dst_w);
    for (std::uint32_t y = 0; y < dst_h; ++y) {
        const float* r0 = src.data() + std::size_t(ty[y].lo) * src_w;
        const float* r1 = src.data() + std::size_t(ty[y].hi) * src_w;
        const double fy = ty[y].frac;
        for (std::uint32_t x = 0; x < dst_w; ++x) {
            const double fx = tx[x].frac;
            const double top = r0[tx[x].lo] + (double(r0[tx[x].hi]) - r0[tx[x].lo]) * fx;
            const double bottom = r1[tx[x].lo] + (double(r1[tx[x].hi]) - r1[tx[x].lo]) * fx;
            dst[std::size_t(y) * dst_w + x] = static_cast<float>(top + (bottom - top) * fy);
        }
    }
    return dst;
}

ModelInput normalize_slice(const EchogramSlice& slice, std::uint32_t out_height, std::uint32_t out_width) {
    slice.validate();
    if (slice.width == 0 || slice.height == 0) fail(ErrorCode::Argument, "cannot normalize an empty slice");
    const std::size_t n = std::size_t(slice.width) * slice.height;
    std::vector<float> intensity(n), lateral(n);
    for (std::size_t i = 0; i < n; ++i) {
        intensity[i] = static_cast<float>((slice.intensity[i] / 255.0 - 0.5) / 0.25);
        lateral[i] = static_cast<float>((slice.lateral[i].value() - 0.5) / 0.25);
    }
    ModelInput input;
    input.height = out_height;
    input.width = out_width;
    input.values = resize_bilinear(intensity, slice.height, slice.width, out_height, out_width);
    const auto resized = resize_bilinear(lateral, slice.height, slice.width, out_height, out_width);
    input.values.insert(input.values.end(), resized.begin(), resized.end());
    return input;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[at + i]) << (8 * i);
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_echogram(const Echogram& echogram) {
    echogram.validate();
    std::vector<std::uint8_t> out;
    const std::size_t n = std::size_t(echogram.width) * echogram.height;
    out.reserve(kEchogramHeaderBytes + 2 * n);
    out.insert(out.end(), std::begin(kEchogramMagic), std::end(kEchogramMagic));
    put_u32(out, echogram.width);
    put_u32(out, echogram.height);
    out.push_back(echogram.padded ? 1 : 0);
    put_u32(out, echogram.padded ? echogram.pad_start : 0);
    out.insert(out.end(), echogram.intensity.begin(), echogram.intensity.end());
    for (const Lateral& l : echogram.lateral) out.push_back(l.quantized());
    return out;
}

Echogram decode_echogram(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kEchogramMagic, 4) != 0)
        fail(ErrorCode::Format, "not an ECG1 echogram (bad magic)");
    if (bytes.size() < kEchogramHeaderBytes) fail(ErrorCode::Truncation, "ECG1 header truncated");
    const std::uint32_t width = get_u32(bytes, 4);
    const std::uint32_t height = get_u32(bytes, 8);
    const std::uint8_t flags = bytes[12];
    const std::uint32_t pad_start = get_u32(bytes, 13);
    if (flags & ~std::uint8_t{1}) fail(ErrorCode::Format, "ECG1 unknown flag bits set");

    const std::uint64_t n = std::uint64_t(width) * height;
    const std::uint64_t payload = bytes.size() - kEchogramHeaderBytes;
    if (payload < 2 * n)
        fail(ErrorCode::Truncation, "ECG1 payload truncated: expected " + std::to_string(2 * n) +
                                        " bytes, found " + std::to_string(payload));
    if (payload > 2 * n) fail(ErrorCode::Format, "ECG1 payload has trailing bytes");
    if (!(flags & 1) && pad_start != 0) fail(ErrorCode::Format, "ECG1 pad_start set without padded flag");

    Echogram echogram(width, height);
    echogram.padded = flags & 1;
    echogram.pad_start = pad_start;
    const std::uint8_t* planes = bytes.data() + kEchogramHeaderBytes;
    std::copy(planes, planes + n, echogram.intensity.begin());
    for (std::size_t i = 0; i < n; ++i) echogram.lateral[i] = Lateral::from_byte(planes[n + i]);
    echogram.validate();
    return echogram;
}

Echogram read_echogram(const std::filesystem::path& path) {
    Echogram echogram = decode_echogram(read_file_bytes(path));
    echogram.clip_id = path.stem().string();
    return echogram;
}

void write_echogram(const Echogram& echogram, const std::filesystem::path& path) {
    write_file_bytes(path, encode_echogram(echogram));
}

} // namespace echokit
