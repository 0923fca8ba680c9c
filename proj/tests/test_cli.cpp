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

#include "echokit/counts.hpp"
#include "echokit/dataset.hpp"
#include "echokit/echogram.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace echokit;
using namespace echokit::testing;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run echokit_cli(const TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + ECHOKIT_CLI_PATH + "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(out);
    r.err = read_text_file(err);
    return r;
}

std::string p(const std::filesystem::path& path) {
    return "\"" + path.string() + "\"";
}

} // namespace

TEST_CASE("usage errors exit 2") {
    TempDir dir("cli_usage");
    CHECK(echokit_cli(dir, "frobnicate").code == 2);
    CHECK(echokit_cli(dir, "").code == 2);
    CHECK(echokit_cli(dir, "echogram --in").code == 2);
    const Run help = echokit_cli(dir, "--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("sweep") != std::string::npos);
    CHECK(echokit_cli(dir, "--version").out.find("0.3.0") != std::string::npos);
}

TEST_CASE("validation errors exit 1 with the module's message") {
    TempDir dir("cli_valid");
    const Run r = echokit_cli(dir, "echogram --in nowhere.svc --out x.ecg --alpha0 50 --alpha1 40");
    CHECK(r.code == 1);
    CHECK(r.err.find("alpha0 < alpha1") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "x.ecg"));
    const Run io = echokit_cli(dir, "echogram --in " + p(dir / "nowhere.svc") + " --out " + p(dir / "x.ecg"));
    CHECK(io.code == 1);
    CHECK(io.err.find("I/O") != std::string::npos);
    CHECK(echokit_cli(dir, "slice --in x.ecg --out d --window 0").code == 1);
    CHECK(echokit_cli(dir, "augment --op spin --in x.ecg --out y.ecg").code == 2);
}

TEST_CASE("eval on a perfect prediction file") {
    TempDir dir("cli_eval");
    write_text_file(dir / "l.jsonl", "{\"clip_id\":\"a\",\"x_offset\":0,\"left\":1,\"right\":2,\"source\":\"strong\"}\n");
    write_text_file(dir / "p.jsonl", "{\"clip_id\":\"a\",\"x_offset\":0,\"left_pred\":1,\"right_pred\":2}\n");
    const Run r = echokit_cli(dir, "eval --pred " + p(dir / "p.jsonl") + " --labels " + p(dir / "l.jsonl") +
                                       " --report " + p(dir / "r.json"));
    REQUIRE(r.code == 0);
    const json report = json::parse(read_text_file(dir / "r.json"));
    CHECK(report["total_nmae"] == 0.0);
    for (const char* key : {"n_clips", "total_nmae", "left_nmae", "right_nmae", "total_error", "total_target"})
        CHECK(report.contains(key));
    const json meta = json::parse(read_text_file(dir / "r.json.meta.json"));
    CHECK(meta["subcommand"] == "eval");
    CHECK(meta["version"] == "0.3.0");
    CHECK(meta["parameters"]["pred"] == (dir / "p.jsonl").string());
    CHECK(meta.contains("duration_seconds"));
    CHECK(echokit_cli(dir, "eval --pred " + p(dir / "p.jsonl") + " --labels " + p(dir / "l.jsonl") +
                               " --report " + p(dir / "nested" / "deeper" / "r.json"))
              .code == 0);
    CHECK(std::filesystem::exists(dir / "nested" / "deeper" / "r.json"));

    write_text_file(dir / "short.jsonl", "");
    const Run join = echokit_cli(dir, "eval --pred " + p(dir / "short.jsonl") + " --labels " + p(dir / "l.jsonl"));
    CHECK(join.code == 1);
    CHECK(join.err.find("a@0") != std::string::npos);
}

TEST_CASE("full pipeline on a synthetic suite scores zero with oracle labels") {
    TempDir dir("cli_pipeline");
    REQUIRE(echokit_cli(dir, "synth --suite 3 --seed 5 --out " + p(dir / "s") + " --jobs 2").code == 0);
    std::string all_labels, all_preds;
    for (int i = 0; i < 3; ++i) {
        const std::string id = "suite5_" + std::to_string(i);
        REQUIRE(echokit_cli(dir, "echogram --in " + p(dir / "s" / (id + ".svc")) + " --out " + p(dir / (id + ".ecg")))
                    .code == 0);
        REQUIRE(echokit_cli(dir, "slice --in " + p(dir / (id + ".ecg")) + " --out " + p(dir / "slices")).code == 0);
        REQUIRE(echokit_cli(dir, "label --tracks " + p(dir / "s" / (id + ".tracks.json")) +
                                     " --frames 400 --window 200 --source synthetic --out " +
                                     p(dir / (id + ".labels.jsonl")) + " --pred-out " + p(dir / (id + ".pred.jsonl")))
                    .code == 0);
        CHECK(read_text_file(dir / (id + ".labels.jsonl")) == read_text_file(dir / "s" / (id + ".labels.jsonl")));
        all_labels += read_text_file(dir / (id + ".labels.jsonl"));
        all_preds += read_text_file(dir / (id + ".pred.jsonl"));
    }
    CHECK(std::filesystem::exists(dir / "slices" / "suite5_1_000200.ecg"));
    write_text_file(dir / "labels.jsonl", all_labels);
    write_text_file(dir / "preds.jsonl", all_preds);
    const Run r = echokit_cli(dir, "eval --pred " + p(dir / "preds.jsonl") + " --labels " + p(dir / "labels.jsonl"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["total_nmae"] == 0.0);
    CHECK(read_text_file(dir / "s" / "labels.jsonl") == all_labels);
}

TEST_CASE("subcommands are idempotent and leave inputs alone") {
    TempDir dir("cli_idem");
    REQUIRE(echokit_cli(dir, "synth --suite 1 --seed 9 --out " + p(dir / "s")).code == 0);
    const auto clip = dir / "s" / "suite9_0.svc";
    const auto before = read_file_bytes(clip);
    REQUIRE(echokit_cli(dir, "echogram --in " + p(clip) + " --out " + p(dir / "a.ecg") + " --jobs 1").code == 0);
    REQUIRE(echokit_cli(dir, "echogram --in " + p(clip) + " --out " + p(dir / "b.ecg") + " --jobs 4").code == 0);
    CHECK(read_file_bytes(dir / "a.ecg") == read_file_bytes(dir / "b.ecg"));
    CHECK(read_file_bytes(clip) == before);
    REQUIRE(echokit_cli(dir, "synth --suite 1 --seed 9 --out " + p(dir / "t")).code == 0);
    CHECK(read_file_bytes(dir / "t" / "suite9_0.svc") == before);

    const json meta = json::parse(read_text_file(dir / "a.ecg.meta.json"));
    CHECK(meta["parameters"]["alpha0"] == "20");
    CHECK(meta["parameters"]["preprocess"]["size_thresh"] == 100.0);
    CHECK(meta["inputs"][0] == clip.string());

    REQUIRE(echokit_cli(dir, "export-png --in " + p(dir / "a.ecg") + " --out " + p(dir / "a.png")).code == 0);
    CHECK(std::filesystem::file_size(dir / "a.png") > 8);
}

TEST_CASE("augment and superpose carry sidecar labels") {
    TempDir dir("cli_aug");
    Rng rng(83);
    Echogram a = random_echogram(rng, 20, 6), b = random_echogram(rng, 20, 6);
    write_echogram(a, dir / "a.ecg");
    write_echogram(b, dir / "b.ecg");
    write_text_file(dir / "la.jsonl", "{\"clip_id\":\"a\",\"x_offset\":0,\"left\":0,\"right\":3,\"source\":\"weak\"}\n");
    write_text_file(dir / "lb.jsonl", "{\"clip_id\":\"b\",\"x_offset\":0,\"left\":1,\"right\":2,\"source\":\"weak\"}\n");

    REQUIRE(echokit_cli(dir, "augment --op hflip --in " + p(dir / "a.ecg") + " --out " + p(dir / "h.ecg") +
                                 " --labels " + p(dir / "la.jsonl") + " --labels-out " + p(dir / "lh.jsonl"))
                .code == 0);
    const auto flipped = read_labels(dir / "lh.jsonl");
    CHECK(flipped[0].left == 3);
    CHECK(flipped[0].right == 0);
    REQUIRE(echokit_cli(dir, "augment --op hflip --in " + p(dir / "h.ecg") + " --out " + p(dir / "hh.ecg")).code == 0);
    CHECK(read_file_bytes(dir / "hh.ecg") == read_file_bytes(dir / "a.ecg"));

    REQUIRE(echokit_cli(dir, "superpose --a " + p(dir / "a.ecg") + " --b " + p(dir / "b.ecg") + " --out " +
                                 p(dir / "s.ecg") + " --labels-a " + p(dir / "la.jsonl") + " --labels-b " +
                                 p(dir / "lb.jsonl") + " --labels-out " + p(dir / "ls.jsonl"))
                .code == 0);
    const auto summed = read_labels(dir / "ls.jsonl");
    CHECK(summed[0].left == 1);
    CHECK(summed[0].right == 5);
    const Echogram s = read_echogram(dir / "s.ecg");
    for (std::size_t i = 0; i < s.intensity.size(); ++i)
        CHECK(s.intensity[i] == std::max(a.intensity[i], b.intensity[i]));
    CHECK(echokit_cli(dir, "superpose --a " + p(dir / "a.ecg") + " --b " + p(dir / "b.ecg") + " --out " +
                               p(dir / "s2.ecg") + " --labels-a " + p(dir / "la.jsonl"))
              .code == 2);
}

TEST_CASE("manifest and manifest-check") {
    TempDir dir("cli_manifest");
    std::filesystem::create_directories(dir / "strong");
    std::filesystem::create_directories(dir / "weak");
    write_text_file(dir / "strong" / "labels.jsonl",
                    "{\"clip_id\":\"a\",\"x_offset\":0,\"left\":0,\"right\":2}\n"
                    "{\"clip_id\":\"b\",\"x_offset\":0,\"left\":1,\"right\":0}\n");
    write_text_file(dir / "weak" / "labels.jsonl", "{\"clip_id\":\"c\",\"x_offset\":200,\"left\":0,\"right\":1}\n");
    for (const auto& slice : {dir / "strong" / "a_000000.ecg", dir / "strong" / "b_000000.ecg",
                              dir / "weak" / "c_000200.ecg"})
        write_text_file(slice, "");
    write_text_file(dir / "splits.json", R"({"train":["a","c"],"val":["b"],"locations":{"a":"KL","b":"KL","c":"KR"}})");
    REQUIRE(echokit_cli(dir, "manifest --strong " + p(dir / "strong") + " --weak " + p(dir / "weak") + " --splits " +
                                 p(dir / "splits.json") + " --out " + p(dir / "m.jsonl"))
                .code == 0);
    const Manifest m = read_manifest(dir / "m.jsonl");
    REQUIRE(m.size() == 3);
    CHECK(m[0].slice_id == "a_000000");
    CHECK(m[0].source == LabelSource::Strong);
    CHECK(m[2].source == LabelSource::Weak);
    CHECK(m[2].location == "KR");

    const Run ok = echokit_cli(dir, "manifest-check --in " + p(dir / "m.jsonl"));
    CHECK(ok.code == 0);
    const json report = json::parse(ok.out);
    CHECK(report["disjoint"] == true);
    CHECK(report["balance"]["train"]["right"] == 3);

    Manifest leaky = m;
    leaky.push_back({"a_000200", "x", "a", 200, 0, 0, LabelSource::Weak, Split::Test, "KL"});
    write_manifest(leaky, dir / "leaky.jsonl");
    const Run bad = echokit_cli(dir, "manifest-check --in " + p(dir / "leaky.jsonl") + " --report " + p(dir / "r.json"));
    CHECK(bad.code == 1);
    CHECK(json::parse(read_text_file(dir / "r.json"))["leaks"][0]["clip_id"] == "a");

    const Run empty = echokit_cli(dir, "manifest --splits " + p(dir / "splits.json") + " --out " + p(dir / "e.jsonl"));
    CHECK(empty.code == 0);
    CHECK(read_text_file(dir / "e.jsonl").empty());

    write_text_file(dir / "weak" / "labels.jsonl", "{\"clip_id\":\"a\",\"x_offset\":0,\"left\":0,\"right\":1}\n");
    const Run clash = echokit_cli(dir, "manifest --strong " + p(dir / "strong") + " --weak " + p(dir / "weak") +
                                           " --splits " + p(dir / "splits.json") + " --out " + p(dir / "m2.jsonl"));
    CHECK(clash.code == 1);
    CHECK(clash.err.find("a_000000") != std::string::npos);
}

TEST_CASE("sweep writes one CSV row per configuration") {
    TempDir dir("cli_sweep");
    const Run r = echokit_cli(dir, "sweep --suite 2 --seed 3 --oracle --out " + p(dir / "sweep.csv"));
    REQUIRE(r.code == 0);
    std::istringstream csv(read_text_file(dir / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("config,alpha0,alpha1,alpha2,size_thresh,reference_range", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> fields;
        std::istringstream row(line);
        for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
        REQUIRE(fields.size() == 13);
        CHECK(fields[6] == "2");
        CHECK(fields[10] == "0");
    }
    CHECK(rows == 4);
    CHECK(echokit_cli(dir, "sweep --out " + p(dir / "x.csv")).code == 2);
}
