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

#include "doctest.h"
#include "test_support.hpp"

#include "echokit/dataset.hpp"
#include "echokit/error.hpp"

#include <set>

using namespace echokit;
using namespace echokit::testing;

namespace {

LabeledSliceRef ref(const std::string& clip, std::uint32_t off, std::uint32_t left, std::uint32_t right,
                    LabelSource source) {
    return {{clip, off, left, right, source}, slice_file_name(clip, off)};
}

SplitAssignment assign(std::initializer_list<std::pair<std::string, Split>> pairs) {
    SplitAssignment s;
    for (const auto& [clip, split] : pairs) s.split_of[clip] = split;
    return s;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Argument;
}

} // namespace

TEST_CASE("slice naming") {
    CHECK(slice_id("clipA", 200) == "clipA_000200");
    CHECK(slice_file_name("clipA", 0) == "clipA_000000.ecg");
}

TEST_CASE("build_manifest examples") {
    const auto splits = assign({{"a", Split::Train}, {"b", Split::Val}});
    SUBCASE("strong only") {
        const std::vector<LabeledSliceRef> strong{ref("b", 0, 0, 1, LabelSource::Strong),
                                                  ref("a", 0, 1, 0, LabelSource::Strong)};
        const Manifest m = build_manifest(strong, {}, splits);
        REQUIRE(m.size() == 2);
        CHECK(m[0].slice_id == "a_000000");
        CHECK(m[0].split == Split::Train);
        for (const auto& r : m) CHECK(r.source == LabelSource::Strong);
    }
    SUBCASE("empty inputs") {
        CHECK(build_manifest({}, {}, splits).empty());
    }
    SUBCASE("duplicate slice ids conflict") {
        const std::vector<LabeledSliceRef> strong{ref("a", 0, 0, 1, LabelSource::Strong)};
        const std::vector<LabeledSliceRef> weak{ref("a", 0, 0, 1, LabelSource::Weak)};
        CHECK(code_of([&] { build_manifest(strong, weak, splits); }) == ErrorCode::Conflict);
        try {
            build_manifest(strong, weak, splits);
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("a_000000") != std::string::npos);
        }
    }
    SUBCASE("unassigned clips") {
        const std::vector<LabeledSliceRef> weak{ref("zzz", 0, 0, 1, LabelSource::Weak)};
        CHECK(code_of([&] { build_manifest({}, weak, splits); }) == ErrorCode::Argument);
    }
}

TEST_CASE("build_manifest is order-insensitive") {
    Rng rng(73);
    SplitAssignment splits;
    std::vector<LabeledSliceRef> strong, weak;
    for (int c = 0; c < 10; ++c) {
        const std::string clip = "clip" + std::to_string(c);
        splits.split_of[clip] = Split(c % 3);
        for (std::uint32_t w = 0; w < 3; ++w) {
            auto& target = c % 2 ? strong : weak;
            target.push_back(ref(clip, w * 200, uniform_u32(rng, 0, 3), uniform_u32(rng, 0, 3),
                                 c % 2 ? LabelSource::Strong : LabelSource::Weak));
        }
    }
    const Manifest m = build_manifest(strong, weak, splits);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(strong.begin(), strong.end(), rng);
        std::shuffle(weak.begin(), weak.end(), rng);
        CHECK(build_manifest(strong, weak, splits) == m);
    }
}

TEST_CASE("split disjointness") {
    Manifest m;
    m.push_back({"a_000000", "", "a", 0, 0, 2, LabelSource::Weak, Split::Train, "KL"});
    m.push_back({"b_000000", "", "b", 0, 1, 0, LabelSource::Weak, Split::Val, "KL"});
    CHECK(check_split_disjoint(m).ok);
    CHECK(check_split_disjoint({}).ok);
    m.push_back({"a_000200", "", "a", 200, 0, 0, LabelSource::Weak, Split::Val, "KL"});
    const SplitCheck bad = check_split_disjoint(m);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.leaks.size() == 1);
    CHECK(bad.leaks[0].clip_id == "a");
    CHECK(bad.leaks[0].splits == std::vector<Split>{Split::Train, Split::Val});
    CHECK(check_report_json(bad, class_balance(m)).find("\"a\"") != std::string::npos);
}

TEST_CASE("planted leaks are always found") {
    Rng rng(79);
    for (int i = 0; i < 100; ++i) {
        Manifest m;
        const std::uint32_t clips = uniform_u32(rng, 2, 12);
        for (std::uint32_t c = 0; c < clips; ++c)
            for (std::uint32_t w = 0; w < uniform_u32(rng, 1, 4); ++w)
                m.push_back({slice_id("c" + std::to_string(c), w * 200), "", "c" + std::to_string(c), w * 200, 0, 0,
                             LabelSource::Weak, Split(c % 3), ""});
        REQUIRE(check_split_disjoint(m).ok);
        const std::size_t victim = uniform_u32(rng, 0, std::uint32_t(m.size() - 1));
        const Split original = m[victim].split;
        ManifestRecord leak = m[victim];
        leak.x_offset += 10000;
        leak.slice_id = slice_id(leak.clip_id, leak.x_offset);
        leak.split = Split((int(original) + uniform_u32(rng, 1, 2)) % 3);
        m.push_back(leak);
        const SplitCheck check = check_split_disjoint(m);
        CHECK_FALSE(check.ok);
        REQUIRE(check.leaks.size() == 1);
        CHECK(check.leaks[0].clip_id == leak.clip_id);
    }
}

TEST_CASE("class balance sums") {
    Manifest m;
    m.push_back({"a_000000", "", "a", 0, 0, 2, LabelSource::Strong, Split::Train, ""});
    m.push_back({"a_000200", "", "a", 200, 1, 0, LabelSource::Weak, Split::Train, ""});
    m.push_back({"a_000400", "", "a", 400, 0, 0, LabelSource::Weak, Split::Train, ""});
    const ClassBalance b = class_balance(m);
    const BalanceRow& train = b.per_split[std::size_t(Split::Train)];
    CHECK(train.images == 3);
    CHECK(train.left == 1);
    CHECK(train.right == 2);
    CHECK(train.zero_fish_images == 1);
    CHECK(b.per_split[std::size_t(Split::Val)] == BalanceRow{});
    CHECK(b.per_split_source[std::size_t(Split::Train)][std::size_t(LabelSource::Weak)].images == 2);
}

TEST_CASE("splits JSON and manifest JSONL") {
    const SplitAssignment s = parse_splits_json(R"({"train":["a"],"val":["b"],"locations":{"a":"KL"}})");
    CHECK(s.split_of.at("a") == Split::Train);
    CHECK(s.location_of.at("a") == "KL");
    CHECK(code_of([] { parse_splits_json(R"({"train":["a"],"test":["a"]})"); }) == ErrorCode::Conflict);
    CHECK(code_of([] { parse_splits_json("{"); }) == ErrorCode::Format);

    Manifest m;
    m.push_back({"a_000000", "dir/a_000000.ecg", "a", 0, 0, 2, LabelSource::Strong, Split::Train, "KL"});
    m.push_back({"b_000200", "dir/b_000200.ecg", "b", 200, 3, 1, LabelSource::Synthetic, Split::Test, ""});
    CHECK(parse_manifest_jsonl(manifest_to_jsonl(m)) == m);
}

TEST_CASE("collections load from label files") {
    TempDir dir("coll");
    write_text_file(dir / "labels.jsonl", "{\"clip_id\":\"a\",\"x_offset\":200,\"left\":1,\"right\":2}\n");
    CHECK(code_of([&] { load_collection(dir.path(), LabelSource::Strong); }) == ErrorCode::Io);
    write_text_file(dir / "a_000200.ecg", "");
    const auto refs = load_collection(dir.path(), LabelSource::Strong);
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].label.source == LabelSource::Strong);
    CHECK(refs[0].path == (dir / "a_000200.ecg").string());
    CHECK(code_of([&] { load_collection(dir / "nope", LabelSource::Weak); }) == ErrorCode::Io);
}
