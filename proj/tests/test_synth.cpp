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
#include "echokit/synth.hpp"

#include <cmath>

using namespace echokit;
using namespace echokit::testing;

namespace {

SynthConfig small_config() {
    SynthConfig c;
    c.clip_id = "one";
    c.header.frame_count = 200;
    c.header.range_samples = 32;
    c.header.beam_count = 40;
    c.header.window_start = 1.0f;
    c.header.window_end = 11.0f;
    c.background_level = 30;
    return c;
}

} // namespace

TEST_CASE("empty scenes are flat background") {
    const SynthResult r = synth_clip(small_config());
    for (std::uint8_t v : r.clip.samples()) CHECK(v == 30);
    CHECK(r.tracks.tracks.empty());
    for (const auto& l : r.labels) CHECK(l.total() == 0);
}

TEST_CASE("a fish crossing the centre counts once to the right") {
    SynthConfig c = small_config();
    const double B = c.header.beam_count;
    c.fish.push_back({5, 0.02 * B, 0.1 * B, 15.0, 0.0, 200.0, 1.5, 1.0});
    const SynthResult r = synth_clip(c);
    REQUIRE(r.labels.size() == 1);
    CHECK(r.labels[0].left == 0);
    CHECK(r.labels[0].right == 1);
    CHECK(r.labels[0].source == LabelSource::Synthetic);
}

TEST_CASE("left-upstream clips are labeled after orientation") {
    SynthConfig c = small_config();
    c.header.upstream_side = Side::Left;
    const double B = c.header.beam_count;
    c.fish.push_back({5, 0.02 * B, 0.1 * B, 15.0, 0.0, 200.0, 1.5, 1.0});
    const SynthResult r = synth_clip(c);
    CHECK(r.labels[0].left == 1);
    CHECK(r.labels[0].right == 0);
    CHECK(r.tracks.upstream_side == Side::Left);
}

TEST_CASE("generation is deterministic") {
    SynthConfig c = small_config();
    c.noise_sigma = 4;
    c.seed = 7;
    c.fish.push_back({0, 0.5, 2, 10, 0.01, 180, 1.2, 1.1});
    const SynthResult a = synth_clip(c), b = synth_clip(c);
    CHECK(a.clip == b.clip);
    CHECK(a.tracks == b.tracks);
    CHECK(a.labels == b.labels);
    c.seed = 8;
    CHECK_FALSE(synth_clip(c).clip == a.clip);

    const auto s1 = synth_suite(3, 0, 1), s2 = synth_suite(3, 0, 4);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s1[i].clip == s2[i].clip);
        CHECK(s1[i].labels == s2[i].labels);
    }
    CHECK_THROWS_AS(synth_suite(0, 0), Error);
}

TEST_CASE("suite labels equal an independent recount of the tracks") {
    const auto suite = synth_suite(6, 3, 2);
    for (const SynthResult& r : suite) {
        CHECK(r.labels == tracks_to_counts(orient(r.tracks), 200, r.clip.header().frame_count, LabelSource::Synthetic));
        std::uint32_t crossing = 0, total = 0;
        for (const Track& t : r.tracks.tracks) {
            double xs = t.points.front().x, xe = t.points.back().x;
            if (r.tracks.upstream_side == Side::Left) {
                xs = 1 - xs;
                xe = 1 - xe;
            }
            crossing += (xs < 0.5) != (xe < 0.5) && xs != 0.5 && xe != 0.5;
        }
        for (const auto& l : r.labels) total += l.total();
        CHECK(total == crossing);
    }
}

TEST_CASE("the brightest pixel follows the fish") {
    SynthConfig c = small_config();
    c.background_level = 10;
    c.fish.push_back({0, 0.3, 1.0, 8.0, 0.05, 220.0, 1.4, 1.1});
    const SynthResult r = synth_clip(c);
    const ClipHeader& h = c.header;
    REQUIRE_FALSE(r.tracks.tracks.empty());
    for (const TrackPoint& p : r.tracks.tracks[0].points) {
        const FrameView f = r.clip.frame(p.frame);
        std::uint32_t best_r = 0, best_b = 0;
        for (std::uint32_t row = 0; row < h.range_samples; ++row)
            for (std::uint32_t b = 0; b < h.beam_count; ++b)
                if (f.at(row, b) > f.at(best_r, best_b)) {
                    best_r = row;
                    best_b = b;
                }
        const SynthFish& fish = c.fish[0];
        CHECK(std::abs(double(best_r) - fish.row_at(p.frame)) <= 1.0);
        CHECK(std::abs(double(best_b) - fish.beam_at(p.frame)) <= 1.0);
    }
}

TEST_CASE("fish that never appear leave a note, not a track") {
    SynthConfig c = small_config();
    c.fish.push_back({0, 0.0, 500.0, 5.0, 0.0, 200.0, 1.0, 1.0});
    const SynthResult r = synth_clip(c);
    CHECK(r.tracks.tracks.empty());
    CHECK(r.tracks.notes.size() == 1);
}

TEST_CASE("config text round-trip and validation") {
    SynthConfig c = suite_config(5, 2);
    const SynthConfig back = parse_synth_config(synth_config_to_text(c));
    CHECK(synth_clip(back).clip == synth_clip(c).clip);
    CHECK(back.clip_id == c.clip_id);
    CHECK_THROWS_AS(parse_synth_config("frame_count = -3\n"), Error);
    CHECK_THROWS_AS(parse_synth_config("no_such_key = 1\n"), Error);
    SynthConfig bad = small_config();
    bad.fish.push_back({0, 0.1, 1, 1, 0, 300.0, 1, 1});
    CHECK_THROWS_AS(synth_clip(bad), Error);
}
