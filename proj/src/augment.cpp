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

#include "echokit/augment.hpp"

#include "echokit/error.hpp"

#include <algorithm>
#include <utility>

namespace echokit {

AugmentOp parse_augment_op(const std::string& text) {
    if (text == "vflip") return AugmentOp::VFlip;
    if (text == "hflip") return AugmentOp::HFlipNaive;
    if (text == "rhflip") return AugmentOp::HFlipRealistic;
    fail(ErrorCode::Argument, "unknown augmentation '" + text + "' (expected vflip|hflip|rhflip)");
}

const char* to_string(AugmentOp op) noexcept {
    switch (op) {
    case AugmentOp::VFlip: return "vflip";
    case AugmentOp::HFlipNaive: return "hflip";
    case AugmentOp::HFlipRealistic: return "rhflip";
    }
    return "vflip";
}

namespace {

EchogramSlice mirror_rows(const EchogramSlice& s) {
    EchogramSlice out = s;
    for (std::uint32_t r = 0; r < s.height; ++r) {
        const std::uint32_t src = s.height - 1 - r;
        for (std::uint32_t c = 0; c < s.width; ++c) {
            out.intensity[out.index(r, c)] = s.intensity_at(src, c);
            out.lateral[out.index(r, c)] = s.lateral_at(src, c);
        }
    }
    return out;
}

EchogramSlice mirror_columns(const EchogramSlice& s) {
    EchogramSlice out = s;
    for (std::uint32_t r = 0; r < s.height; ++r) {
        for (std::uint32_t c = 0; c < s.width; ++c) {
            const std::uint32_t src = s.width - 1 - c;
            out.intensity[out.index(r, c)] = s.intensity_at(r, src);
            out.lateral[out.index(r, c)] = s.lateral_at(r, src);
        }
    }
    // Padding now sits on the left, which pad_start cannot express.
    out.padded = false;
    out.pad_start = 0;
    return out;
}

} // namespace

CountLabel augment_label(AugmentOp op, const CountLabel& label) {
    CountLabel out = label;
    if (op == AugmentOp::HFlipNaive) std::swap(out.left, out.right);
    return out;
}

CountLabel superpose_labels(const CountLabel& a, const CountLabel& b) {
    CountLabel out = a;
    out.left = a.left + b.left;
    out.right = a.right + b.right;
    return out;
}

LabeledSlice vflip(const LabeledSlice& x) {
    return {mirror_rows(x.slice), augment_label(AugmentOp::VFlip, x.label)};
}

LabeledSlice hflip_naive(const LabeledSlice& x) {
    return {mirror_columns(x.slice), augment_label(AugmentOp::HFlipNaive, x.label)};
}

LabeledSlice hflip_realistic(const LabeledSlice& x) {
    LabeledSlice out{mirror_columns(x.slice), augment_label(AugmentOp::HFlipRealistic, x.label)};
    for (std::size_t i = 0; i < out.slice.lateral.size(); ++i)
        if (out.slice.intensity[i] > 0) out.slice.lateral[i] = out.slice.lateral[i].inverted();
    return out;
}

LabeledSlice superpose(const LabeledSlice& a, const LabeledSlice& b) {
    if (a.slice.width != b.slice.width || a.slice.height != b.slice.height)
        fail(ErrorCode::Validation,
             "superpose: slices differ in shape (" + std::to_string(a.slice.height) + "x" +
                 std::to_string(a.slice.width) + " vs " + std::to_string(b.slice.height) + "x" +
                 std::to_string(b.slice.width) + ")");
    LabeledSlice out{a.slice, superpose_labels(a.label, b.label)};
    for (std::size_t i = 0; i < out.slice.intensity.size(); ++i) {
        if (b.slice.intensity[i] > a.slice.intensity[i]) {
            out.slice.intensity[i] = b.slice.intensity[i];
            out.slice.lateral[i] = b.slice.lateral[i];
        }
    }
    out.slice.padded = a.slice.padded && b.slice.padded;
    out.slice.pad_start = out.slice.padded ? std::max(a.slice.pad_start, b.slice.pad_start) : 0;
    return out;
}

LabeledSlice apply(AugmentOp op, const LabeledSlice& x) {
    switch (op) {
    case AugmentOp::VFlip: return vflip(x);
    case AugmentOp::HFlipNaive: return hflip_naive(x);
    case AugmentOp::HFlipRealistic: return hflip_realistic(x);
    }
    fail(ErrorCode::Argument, "unknown augmentation");
}

} // namespace echokit
