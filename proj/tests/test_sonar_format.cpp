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

#include "echokit/error.hpp"
#include "echokit/sonar_format.hpp"

#include <cstring>

using namespace echokit;
using namespace echokit::testing;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an echokit::Error");
    return ErrorCode::Argument;
}

Clip tiny_clip() {
    ClipHeader h;
    h.frame_count = 2;
    h.range_samples = 2;
    h.beam_count = 3;
    h.window_start = 0.0f;
    h.window_end = 50.0f;
    return Clip(h, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
}

} // namespace

TEST_CASE("SVC1 header layout is 36 little-endian bytes") {
    const auto bytes = encode_clip(tiny_clip());
    REQUIRE(bytes.size() == kClipHeaderBytes + 12);
    CHECK(std::memcmp(bytes.data(), "SVC1", 4) == 0);
    CHECK(bytes[4] == 2);
    CHECK(bytes[8] == 2);
    CHECK(bytes[12] == 3);
    CHECK(bytes[32] == 1); // upstream side Right
    CHECK(bytes[33] == 0);
    CHECK(bytes[36] == 1);
    CHECK(bytes.back() == 12);
}

TEST_CASE("SVC1 rejects bad magic, truncation and trailing bytes") {
    auto bytes = encode_clip(tiny_clip());
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK(code_of([&] { decode_clip(bytes); }) == ErrorCode::Format);
    }
    SUBCASE("truncated header") {
        bytes.resize(20);
        CHECK(code_of([&] { decode_clip(bytes); }) == ErrorCode::Truncation);
    }
    SUBCASE("truncated payload") {
        bytes.pop_back();
        CHECK(code_of([&] { decode_clip(bytes); }) == ErrorCode::Truncation);
    }
    SUBCASE("trailing bytes") {
        bytes.push_back(0);
        CHECK(code_of([&] { decode_clip(bytes); }) == ErrorCode::Format);
    }
    SUBCASE("nonzero reserved byte") {
        bytes[34] = 1;
        CHECK(code_of([&] { decode_clip(bytes); }) == ErrorCode::Format);
    }
    SUBCASE("bad side") {
        bytes[32] = 7;
        CHECK(code_of([&] { decode_clip(bytes); }) != ErrorCode::Truncation);
    }
}

TEST_CASE("Clip construction checks dimensions") {
    ClipHeader h;
    h.frame_count = 2;
    h.range_samples = 2;
    h.beam_count = 2;
    CHECK(code_of([&] { Clip(h, std::vector<std::uint8_t>(7)); }) == ErrorCode::Validation);
    h.beam_count = 0;
    CHECK_THROWS_AS(h.validate(), Error);
    h.beam_count = 2;
    h.window_end = h.window_start;
    CHECK_THROWS_AS(h.validate(), Error);
}

TEST_CASE("SVC1 round-trip is bytewise identical and deterministic") {
    Rng rng(11);
    for (int i = 0; i < 25; ++i) {
        const Clip clip = random_bytes_clip(rng, random_header(rng, 6, 12, 12));
        const auto bytes = encode_clip(clip);
        const Clip back = decode_clip(bytes);
        CHECK(back == clip);
        CHECK(encode_clip(back) == bytes);
    }
}

TEST_CASE("SVC1 file IO") {
    TempDir dir("svc");
    const Clip clip = tiny_clip();
    write_clip(clip, dir / "a.svc");
    CHECK(read_clip(dir / "a.svc") == clip);
    CHECK(code_of([&] { read_clip(dir / "missing.svc"); }) == ErrorCode::Io);
}

TEST_CASE("mean frame matches a direct average") {
    const Clip clip = tiny_clip();
    const MeanFrame mean = mean_frame(clip);
    CHECK(mean.at(0, 0) == doctest::Approx(4.0));
    CHECK(mean.at(1, 2) == doctest::Approx(9.0));

    ClipHeader two;
    two.frame_count = 2;
    two.range_samples = 1;
    two.beam_count = 2;
    CHECK(mean_frame(Clip(two, {0, 7, 100, 7})).at(0, 0) == 50.0);
    CHECK(mean_frame(Clip(two, {0, 7, 100, 7})).at(0, 1) == 7.0);

    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const Clip c = random_bytes_clip(rng, random_header(rng, 9, 8, 8));
        const MeanFrame m = mean_frame(c);
        const ClipHeader& h = c.header();
        for (std::size_t p = 0; p < h.frame_size(); ++p) {
            std::uint64_t sum = 0;
            for (std::uint32_t t = 0; t < h.frame_count; ++t) sum += c.samples()[t * h.frame_size() + p];
            CHECK(m.values[p] == double(sum) / h.frame_count);
        }
    }
}

TEST_CASE("range of sample uses bin centres") {
    ClipHeader h;
    h.window_start = 0.0f;
    h.window_end = 10.0f;
    h.range_samples = 10;
    CHECK(range_of_sample(h, 0) == doctest::Approx(0.5));
    CHECK(code_of([&] { range_of_sample(h, 10); }) == ErrorCode::Index);

    h.window_start = 3.0f;
    h.window_end = 13.0f;
    CHECK(range_of_sample(h, 9) == doctest::Approx(12.5));

    h.range_samples = 1;
    h.window_start = 2.0f;
    h.window_end = 22.0f;
    CHECK(range_of_sample(h, 0) == doctest::Approx(12.0));
}

TEST_CASE("range of sample is strictly increasing inside the window") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const ClipHeader h = random_header(rng, 1, 64, 4);
        double prev = h.window_start;
        for (std::uint32_t r = 0; r < h.range_samples; ++r) {
            const double v = range_of_sample(h, r);
            CHECK(v > prev);
            CHECK(v < h.window_end);
            prev = v;
        }
    }
}

TEST_CASE("side parsing") {
    CHECK(parse_side("left") == Side::Left);
    CHECK(parse_side("right") == Side::Right);
    CHECK(std::string(to_string(Side::Left)) == "left");
    CHECK_THROWS_AS(parse_side("up"), Error);
}
