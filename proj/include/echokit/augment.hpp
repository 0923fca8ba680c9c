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
#include "echokit/echogram.hpp"

#include <string>

namespace echokit {

struct LabeledSlice {
    EchogramSlice slice;
    CountLabel label;
};

enum class AugmentOp { VFlip, HFlipNaive, HFlipRealistic };

AugmentOp parse_augment_op(const std::string& text);
const char* to_string(AugmentOp op) noexcept;

/// Mirrors the range axis; counts unchanged.
LabeledSlice vflip(const LabeledSlice& x);

/// Mirrors the time axis only; apparent direction reverses so left/right swap.
LabeledSlice hflip_naive(const LabeledSlice& x);

/// Mirrors the time axis and inverts lateral position on the support, so
/// fish keep their original direction; counts unchanged.
LabeledSlice hflip_realistic(const LabeledSlice& x);

/// Per pixel, the brighter input wins (ties go to `a`); counts add.
LabeledSlice superpose(const LabeledSlice& a, const LabeledSlice& b);

LabeledSlice apply(AugmentOp op, const LabeledSlice& x);

// Label-only halves of the above, for sidecar label files.
CountLabel augment_label(AugmentOp op, const CountLabel& label);
CountLabel superpose_labels(const CountLabel& a, const CountLabel& b);

} // namespace echokit
