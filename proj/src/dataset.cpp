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

#include "echokit/dataset.hpp"

#include "echokit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace echokit {

using nlohmann::json;

const char* to_string(Split split) noexcept {
    switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& text) {
    if (text == "train" || text == "Train") return Split::Train;
    if (text == "val" || text == "Val") return Split::Val;
    if (text == "test" || text == "Test") return Split::Test;
    fail(ErrorCode::Validation, "split: expected train|val|test, got '" + text + "'");
}

std::string slice_id(const std::string& clip_id, std::uint32_t x_offset) {
    char digits[16];
    std::snprintf(digits, sizeof digits, "%06u", x_offset);
    return clip_id + "_" + digits;
}

std::string slice_file_name(const std::string& clip_id, std::uint32_t x_offset) {
    return slice_id(clip_id, x_offset) + ".ecg";
}

SplitAssignment parse_splits_json(const std::string& text) {
    SplitAssignment out;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, std::string("splits JSON: ") + e.what());
    }
    try {
        for (const Split split : {Split::Train, Split::Val, Split::Test}) {
            if (!j.contains(to_string(split))) continue;
            for (const json& clip : j.at(to_string(split))) {
                const auto id = clip.get<std::string>();
                const auto [it, inserted] = out.split_of.emplace(id, split);
                if (!inserted)
                    fail(ErrorCode::Conflict, "splits JSON: clip '" + id + "' assigned to both " +
                                                  to_string(it->second) + " and " + to_string(split));
            }
        }
        if (j.contains("locations"))
            for (const auto& [clip, tag] : j.at("locations").items())
                out.location_of[clip] = tag.get<std::string>();
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, std::string("splits JSON: ") + e.what());
    }
    return out;
}

std::vector<LabeledSliceRef> load_collection(const std::filesystem::path& dir, LabelSource fallback) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) fail(ErrorCode::Io, "'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    if (fs::exists(dir / "labels.jsonl")) {
        files.push_back(dir / "labels.jsonl");
    } else {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    }

    std::vector<LabeledSliceRef> refs;
    for (const fs::path& file : files) {
        std::vector<CountLabel> labels = parse_labels_jsonl(read_text_file(file), fallback);
        for (CountLabel& label : labels) {
            const fs::path path = dir / slice_file_name(label.clip_id, label.x_offset);
            if (!fs::is_regular_file(path))
                fail(ErrorCode::Io, file.string() + ": no slice file '" + path.string() + "' for label");
            refs.push_back({std::move(label), path.string()});
        }
    }
    return refs;
}

Manifest build_manifest(std::span<const LabeledSliceRef> strong, std::span<const LabeledSliceRef> weak,
                        const SplitAssignment& splits) {
    Manifest manifest;
    manifest.reserve(strong.size() + weak.size());
    std::set<std::string> unassigned;
    auto add = [&](const LabeledSliceRef& ref) {
        ManifestRecord rec;
        rec.slice_id = slice_id(ref.label.clip_id, ref.label.x_offset);
        rec.path = ref.path;
        rec.clip_id = ref.label.clip_id;
        rec.x_offset = ref.label.x_offset;
        rec.left = ref.label.left;
        rec.right = ref.label.right;
        rec.source = ref.label.source;
        const auto split = splits.split_of.find(rec.clip_id);
        if (split == splits.split_of.end()) unassigned.insert(rec.clip_id);
        else rec.split = split->second;
        if (const auto loc = splits.location_of.find(rec.clip_id); loc != splits.location_of.end())
            rec.location = loc->second;
        manifest.push_back(std::move(rec));
    };
    for (const LabeledSliceRef& ref : strong) add(ref);
    for (const LabeledSliceRef& ref : weak) add(ref);

    if (!unassigned.empty()) {
        std::string ids;
        for (const std::string& id : unassigned) ids += (ids.empty() ? "" : ", ") + id;
        fail(ErrorCode::Argument, "clips without a split assignment: " + ids);
    }

    std::stable_sort(manifest.begin(), manifest.end(),
                     [](const ManifestRecord& a, const ManifestRecord& b) { return a.slice_id < b.slice_id; });
    std::vector<std::string> duplicates;
    for (std::size_t i = 1; i < manifest.size(); ++i)
        if (manifest[i].slice_id == manifest[i - 1].slice_id &&
            (duplicates.empty() || duplicates.back() != manifest[i].slice_id))
            duplicates.push_back(manifest[i].slice_id);
    if (!duplicates.empty()) {
        std::string ids;
        for (const std::string& id : duplicates) ids += (ids.empty() ? "" : ", ") + id;
        fail(ErrorCode::Conflict, "duplicate slice_id: " + ids);
    }
    return manifest;
}

SplitCheck check_split_disjoint(const Manifest& manifest) {
    std::map<std::string, std::set<Split>> seen;
    for (const ManifestRecord& rec : manifest) seen[rec.clip_id].insert(rec.split);
    SplitCheck check;
    for (const auto& [clip, splits] : seen) {
        if (splits.size() < 2) continue;
        check.ok = false;
        check.leaks.push_back({clip, std::vector<Split>(splits.begin(), splits.end())});
    }
    return check;
}

ClassBalance class_balance(const Manifest& manifest) {
    ClassBalance balance;
    for (const ManifestRecord& rec : manifest) {
        for (BalanceRow* row : {&balance.per_split[std::size_t(rec.split)],
                                &balance.per_split_source[std::size_t(rec.split)][std::size_t(rec.source)]}) {
            ++row->images;
            row->left += rec.left;
            row->right += rec.right;
            if (rec.left + rec.right == 0) ++row->zero_fish_images;
        }
    }
    return balance;
}

namespace {

json record_to_json(const ManifestRecord& r) {
    return {{"slice_id", r.slice_id}, {"path", r.path},   {"clip_id", r.clip_id},
            {"x_offset", r.x_offset}, {"left", r.left},   {"right", r.right},
            {"source", to_string(r.source)}, {"split", to_string(r.split)}, {"location", r.location}};
}

json balance_row_json(const BalanceRow& row) {
    return {{"images", row.images},
            {"left", row.left},
            {"right", row.right},
            {"zero_fish_images", row.zero_fish_images}};
}

} // namespace

std::string manifest_to_jsonl(const Manifest& manifest) {
    std::string out;
    for (const ManifestRecord& rec : manifest) out += record_to_json(rec).dump() + "\n";
    return out;
}

Manifest parse_manifest_jsonl(const std::string& text) {
    Manifest manifest;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "manifest line " + std::to_string(number);
        try {
            const json j = json::parse(line);
            ManifestRecord rec;
            rec.slice_id = j.at("slice_id").get<std::string>();
            rec.path = j.value("path", std::string{});
            rec.x_offset = j.at("x_offset").get<std::uint32_t>();
            rec.clip_id = j.contains("clip_id") ? j.at("clip_id").get<std::string>() : std::string{};
            if (rec.clip_id.empty()) {
                // Fall back to the slice id stem: <clip_id>_<offset>.
                const auto cut = rec.slice_id.rfind('_');
                rec.clip_id = cut == std::string::npos ? rec.slice_id : rec.slice_id.substr(0, cut);
            }
            const auto left = j.at("left").get<std::int64_t>();
            const auto right = j.at("right").get<std::int64_t>();
            if (left < 0 || right < 0) fail(ErrorCode::Validation, where + ": counts must be >= 0");
            rec.left = static_cast<std::uint32_t>(left);
            rec.right = static_cast<std::uint32_t>(right);
            rec.source = parse_label_source(j.at("source").get<std::string>());
            rec.split = parse_split(j.at("split").get<std::string>());
            rec.location = j.value("location", std::string{});
            if (!ids.insert(rec.slice_id).second)
                fail(ErrorCode::Conflict, where + ": duplicate slice_id '" + rec.slice_id + "'");
            manifest.push_back(std::move(rec));
        } catch (const json::exception& e) {
            fail(ErrorCode::Format, where + ": " + e.what());
        }
    }
    return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
    return parse_manifest_jsonl(read_text_file(path));
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    write_text_file(path, manifest_to_jsonl(manifest));
}

std::string check_report_json(const SplitCheck& check, const ClassBalance& balance) {
    json j;
    j["disjoint"] = check.ok;
    j["leaks"] = json::array();
    for (const SplitLeak& leak : check.leaks) {
        json splits = json::array();
        for (Split s : leak.splits) splits.push_back(to_string(s));
        j["leaks"].push_back({{"clip_id", leak.clip_id}, {"splits", splits}});
    }
    json per_split = json::object();
    for (const Split split : {Split::Train, Split::Val, Split::Test}) {
        json entry = balance_row_json(balance.per_split[std::size_t(split)]);
        json by_source = json::object();
        for (const LabelSource source : {LabelSource::Strong, LabelSource::Weak, LabelSource::Synthetic})
            by_source[to_string(source)] =
                balance_row_json(balance.per_split_source[std::size_t(split)][std::size_t(source)]);
        entry["by_source"] = by_source;
        per_split[to_string(split)] = entry;
    }
    j["balance"] = per_split;
    return j.dump(2) + "\n";
}

} // namespace echokit
