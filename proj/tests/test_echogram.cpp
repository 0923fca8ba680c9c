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

#include "echokit/echogram.hpp"
#include "echokit/error.hpp"
#include "echokit/synth.hpp"

#include <numeric>

using namespace echokit;
using namespace echokit::testing;

TEST_CASE("lateral values are exact rationals") {
    CHECK(Lateral::from_beam(3, 5) == Lateral{3, 4});
    CHECK(Lateral::from_beam(3, 5).value() == 0.75);
    CHECK(Lateral{1, 2} == Lateral{2, 4});
    CHECK(Lateral{3, 4}.inverted() == Lateral{1, 4});
    for (unsigned q = 0; q < 256; ++q) {
        const Lateral l = Lateral::from_byte(std::uint8_t(q));
        CHECK(l.quantized() == q);
        CHECK(l.inverted().inverted() == l);
        CHECK(l.inverted().quantized() == 255 - q);
    }
    CHECK(Lateral{1, 2}.quantized() == 128);
}

TEST_CASE("collapse_frame max and argmax") {
    SUBCASE("empty frame") {
        const std::vector<std::uint8_t> px(12, 0);
        const EchogramColumn col = collapse_frame(FrameView{px, 3, 4});
        for (std::uint32_t r = 0; r < 3; ++r) {
            CHECK(col.intensity[r] == 0);
            CHECK(col.lateral[r].num == 0);
        }
    }
    SUBCASE("single bright pixel") {
        std::vector<std::uint8_t> px(10 * 5, 0);
        px[7 * 5 + 3] = 200;
        const EchogramColumn col = collapse_frame(FrameView{px, 10, 5});
        CHECK(col.intensity[7] == 200);
        CHECK(col.lateral[7].value() == 0.75);
    }
    SUBCASE("ties go to the smallest beam") {
        const std::uint32_t beams = 6;
        std::vector<std::uint8_t> px(beams, 10);
        px[1] = px[4] = 90;
        const EchogramColumn col = collapse_frame(FrameView{px, 1, beams});
        CHECK(col.lateral[0] == Lateral{1, beams - 1});
    }
    SUBCASE("a single beam cannot be normalized") {
        const std::vector<std::uint8_t> px(4, 1);
        CHECK_THROWS_AS(collapse_frame(FrameView{px, 4, 1}), Error);
    }
}

TEST_CASE("build_echogram equals the brute-force oracle") {
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        const Clip clip = random_clip(rng, random_header(rng, 4, 16, 16));
        const PreprocessConfig config = sweep_table_configs()[i % 4];
        const Echogram built = build_echogram(clip, config, "c", 3);
        CHECK(built.same_pixels(oracle_echogram(clean_clip(clip, config))));
        CHECK(built.width == clip.header().frame_count);
        CHECK(built.height == clip.header().range_samples);
    }
}

TEST_CASE("constant clips give empty echograms") {
    ClipHeader h;
    h.frame_count = 5;
    h.range_samples = 6;
    h.beam_count = 4;
    const Clip c(h, std::vector<std::uint8_t>(5 * 24, 120));
    CHECK(build_echogram(c, PreprocessConfig{}).nonzero_count() == 0);
}

TEST_CASE("intensity is invariant under beam permutation") {
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        const ClipHeader h = random_header(rng, 3, 10, 10);
        const Clip clip = random_bytes_clip(rng, h);
        std::vector<std::uint32_t> perm(h.beam_count);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::uint8_t> permuted(clip.samples().size());
        for (std::size_t t = 0; t < h.frame_count; ++t)
            for (std::size_t r = 0; r < h.range_samples; ++r)
                for (std::size_t b = 0; b < h.beam_count; ++b)
                    permuted[t * h.frame_size() + r * h.beam_count + perm[b]] =
                        clip.samples()[t * h.frame_size() + r * h.beam_count + b];
        const PreprocessConfig raw{0, 0, 0, 0, 5, true};
        const Echogram a = build_echogram(clip, raw);
        const Echogram b = build_echogram(Clip(h, permuted), raw);
        CHECK(a.intensity == b.intensity);
    }
}

TEST_CASE("a rightward fish draws a rising lateral streak") {
    SynthConfig config;
    config.header.frame_count = 60;
    config.header.range_samples = 24;
    config.header.beam_count = 32;
    config.header.window_end = 10.0f;
    config.background_level = 0;
    config.fish.push_back({0, 0.5, 0.0, 12.0, 0.0, 220.0, 1.5, 1.0});
    const SynthResult result = synth_clip(config);
    const Echogram e = build_echogram(result.clip, PreprocessConfig{0, 0, 0, 0, 5, true});
    double prev = -1;
    for (std::uint32_t x = 0; x < e.width; ++x) {
        if (e.intensity_at(12, x) == 0) continue;
        CHECK(e.lateral_at(12, x).value() >= prev);
        prev = e.lateral_at(12, x).value();
    }
    CHECK(prev > 0.5);
}

TEST_CASE("slicing offsets and padding") {
    auto offsets = [](std::uint32_t width) {
        Echogram e(width, 3);
        std::vector<std::pair<std::uint32_t, bool>> out;
        for (const auto& s : slice_echogram(e)) {
            CHECK(s.width == 200);
            out.emplace_back(s.x_offset, s.padded);
        }
        return out;
    };
    using V = std::vector<std::pair<std::uint32_t, bool>>;
    CHECK(offsets(600) == V{{0, false}, {200, false}, {400, false}});
    CHECK(offsets(500) == V{{0, false}, {200, false}, {400, true}});
    CHECK(offsets(200) == V{{0, false}});
    Echogram e(500, 2);
    CHECK(slice_echogram(e).back().pad_start == 100);
    CHECK_THROWS_AS(slice_echogram(e, 0, 1), Error);
}

TEST_CASE("exact tiling reconstructs the echogram") {
    Rng rng(29);
    const Echogram e = random_echogram(rng, 600, 7);
    const auto slices = slice_echogram(e, 150, 150);
    REQUIRE(slices.size() == 4);
    Echogram joined(600, 7);
    for (const auto& s : slices)
        for (std::uint32_t r = 0; r < 7; ++r)
            for (std::uint32_t c = 0; c < s.width; ++c) {
                joined.intensity[joined.index(r, s.x_offset + c)] = s.intensity_at(r, c);
                joined.lateral[joined.index(r, s.x_offset + c)] = s.lateral_at(r, c);
            }
    CHECK(joined.same_pixels(e));
}

TEST_CASE("normalize_slice affine map") {
    Echogram s(800, 200);
    s.intensity[0] = 255;
    s.lateral[0] = Lateral{1, 2};
    s.intensity[1] = 255;
    s.lateral[1] = Lateral{1, 1};
    const ModelInput in = normalize_slice(s);
    REQUIRE(in.values.size() == 2u * 200 * 800);
    CHECK(in.at(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(in.at(0, 0, 2) == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(in.at(1, 0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(in.at(1, 0, 1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(in.at(1, 0, 2) == doctest::Approx(-2.0).epsilon(1e-6));

    Rng rng(37);
    const Echogram r = random_echogram(rng, 800, 200);
    const ModelInput identity = normalize_slice(r);
    for (std::uint32_t y = 0; y < 200; y += 13)
        for (std::uint32_t x = 0; x < 800; x += 17)
            CHECK(std::abs(identity.at(0, y, x) - float((r.intensity_at(y, x) / 255.0 - 0.5) / 0.25)) < 1e-6f);

    const Echogram small = random_echogram(rng, 50, 30);
    for (float v : normalize_slice(small).values) {
        CHECK(v >= -2.0f);
        CHECK(v <= 2.0f);
    }
}

TEST_CASE("ECG1 round-trip and corruption") {
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        Echogram e = random_echogram(rng, uniform_u32(rng, 1, 40), uniform_u32(rng, 1, 20));
        if (i % 3 == 0) {
            e.padded = true;
            e.pad_start = uniform_u32(rng, 0, e.width);
        }
        const auto bytes = encode_echogram(e);
        CHECK(bytes.size() == kEchogramHeaderBytes + 2 * e.intensity.size());
        const Echogram back = decode_echogram(bytes);
        CHECK(back.same_pixels(e));
        CHECK(back.padded == e.padded);
        CHECK(back.pad_start == e.pad_start);
        CHECK(encode_echogram(back) == bytes);
    }
    auto code = [](std::vector<std::uint8_t> bytes) {
        try {
            decode_echogram(bytes);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Argument;
    };
    const auto good = encode_echogram(random_echogram(rng, 4, 4, 1.0));
    auto bad = good;
    bad[0] = 'X';
    CHECK(code(bad) == ErrorCode::Format);
    bad = good;
    bad.pop_back();
    CHECK(code(bad) == ErrorCode::Truncation);
    bad = good;
    bad.push_back(0);
    CHECK(code(bad) == ErrorCode::Format);
    Echogram zero(2, 1);
    auto z = encode_echogram(zero);
    z.back() = 9; // lateral set where intensity is zero
    CHECK(code(z) == ErrorCode::Validation);
}

TEST_CASE("PNG export writes a PNG file") {
    TempDir dir("png");
    Rng rng(43);
    export_png(random_echogram(rng, 30, 10), dir / "e.png");
    const auto bytes = read_file_bytes(dir / "e.png");
    REQUIRE(bytes.size() > 8);
    CHECK(bytes[1] == 'P');
    CHECK(bytes[2] == 'N');
    CHECK(bytes[3] == 'G');
}
