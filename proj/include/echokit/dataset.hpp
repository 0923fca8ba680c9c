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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace echokit {

enum class Split { Train, Val, Test };

const char* to_string(Split split) noexcept;
Split parse_split(const std::string& text);

/// `<clip_id>_<x_offset, 6 digits>`; doubles as the slice file stem.
std::string slice_id(const std::string& clip_id, std::uint32_t x_offset);
std::string slice_file_name(const std::string& clip_id, std::uint32_t x_offset);

struct ManifestRecord {
    std::string slice_id;
    std::string path;
    std::string clip_id;
    std::uint32_t x_offset = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    LabelSource source = LabelSource::Weak;
    Split split = Split::Train;
    std::string location;

    bool operator==(const ManifestRecord&) const = default;
};

using Manifest = std::vector<ManifestRecord>;

/// A count label together with the slice file it describes.
struct LabeledSliceRef {
    CountLabel label;
    std::string path;
};

/// Clip-granular split assignment plus optional location tags.
struct SplitAssignment {
    std::map<std::string, Split> split_of;
    std::map<std::string, std::string> location_of;
};

SplitAssignment parse_splits_json(const std::string& text);

/// Reads `labels.jsonl` (or every *.jsonl, sorted) in `dir`; slice paths are
/// resolved next to it. `fallback` tags records lacking a source field.
std::vector<LabeledSliceRef> load_collection(const std::filesystem::path& dir, LabelSource fallback);

Manifest build_manifest(std::span<const LabeledSliceRef> strong, std::span<const LabeledSliceRef> weak,
                        const SplitAssignment& splits);

struct SplitLeak {
    std::string clip_id;
    std::vector<Split> splits;
};

struct SplitCheck {
    bool ok = true;
    std::vector<SplitLeak> leaks; // sorted by clip_id
};

SplitCheck check_split_disjoint(const Manifest& manifest);

struct BalanceRow {
    std::uint64_t images = 0;
    std::uint64_t left = 0;
    std::uint64_t right = 0;
    std::uint64_t zero_fish_images = 0;
    bool operator==(const BalanceRow&) const = default;
};

struct ClassBalance {
    std::array<BalanceRow, 3> per_split{};
    /// [split][source]
    std::array<std::array<BalanceRow, 3>, 3> per_split_source{};
};

ClassBalance class_balance(const Manifest& manifest);

std::string manifest_to_jsonl(const Manifest& manifest);
Manifest parse_manifest_jsonl(const std::string& text);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// {"disjoint": bool, "leaks": [...], "balance": {...}}
std::string check_report_json(const SplitCheck& check, const ClassBalance& balance);

} // namespace echokit
