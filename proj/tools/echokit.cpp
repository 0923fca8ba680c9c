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

// echokit command-line tool. Everything below goes through the C API in
// echokit.h; this file owns argument parsing, run metadata and file layout.

#include "echokit/echokit.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
    ek_status status;
    std::string message;
};

void check(ek_status status) {
    if (status != EK_OK) throw Failure{status, ek_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using ClipPtr = std::unique_ptr<ek_clip, Deleter<ek_clip, ek_clip_free>>;
using EchogramPtr = std::unique_ptr<ek_echogram, Deleter<ek_echogram, ek_echogram_free>>;
using TracksPtr = std::unique_ptr<ek_tracks, Deleter<ek_tracks, ek_tracks_free>>;
using LabelsPtr = std::unique_ptr<ek_labels, Deleter<ek_labels, ek_labels_free>>;
using PredictionsPtr = std::unique_ptr<ek_predictions, Deleter<ek_predictions, ek_predictions_free>>;
using ManifestPtr = std::unique_ptr<ek_manifest, Deleter<ek_manifest, ek_manifest_free>>;
using SynthPtr = std::unique_ptr<ek_synth, Deleter<ek_synth, ek_synth_free>>;
using CString = std::unique_ptr<char, Deleter<char, ek_string_free>>;

ClipPtr read_clip(const std::string& path) {
    ek_clip* raw = nullptr;
    check(ek_clip_read(path.c_str(), &raw));
    return ClipPtr(raw);
}

EchogramPtr read_echogram(const std::string& path) {
    ek_echogram* raw = nullptr;
    check(ek_echogram_read(path.c_str(), &raw));
    return EchogramPtr(raw);
}

LabelsPtr read_labels(const std::string& path) {
    ek_labels* raw = nullptr;
    check(ek_labels_read(path.c_str(), &raw));
    return LabelsPtr(raw);
}

LabelsPtr concat_labels(const std::vector<LabelsPtr>& parts) {
    ek_labels* raw = nullptr;
    check(ek_labels_create(&raw));
    LabelsPtr all(raw);
    for (const LabelsPtr& part : parts) {
        for (std::size_t i = 0; i < ek_labels_size(part.get()); ++i) {
            ek_label_view view;
            check(ek_labels_get(part.get(), i, &view));
            check(ek_labels_append(all.get(), &view));
        }
    }
    return all;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure{EK_ERR_IO, "cannot create directory '" + dir + "': " + ec.message()};
}

void ensure_parent(const std::string& file) {
    const fs::path parent = fs::path(file).parent_path();
    if (!parent.empty()) ensure_directory(parent.string());
}

void write_text(const fs::path& path, const std::string& text) {
    ensure_parent(path.string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Failure{EK_ERR_IO, "cannot write '" + path.string() + "'"};
}

unsigned default_jobs() {
    if (const char* env = std::getenv("ECHOKIT_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
        std::cerr << "echokit: ignoring invalid ECHOKIT_JOBS='" << env << "'\n";
    }
    return 1;
}

/// Runs fn(i) for i in [0, n) on `jobs` threads; results land in caller-owned slots.
template <typename Fn>
void run_parallel(std::size_t n, unsigned jobs, Fn&& fn) {
    std::vector<std::optional<Failure>> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (const Failure& f) {
            errors[i] = f;
        }
    };
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < std::min<std::size_t>(jobs, n); ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) guarded(i);
            });
    }
    for (auto& e : errors)
        if (e) throw *e;
}

struct Preprocess {
    double alpha0 = 0, alpha1 = 0, alpha2 = 0, size_thresh = 0, ref_range = 0;
    bool sweep = false;

    Preprocess() {
        ek_preprocess_config d;
        ek_preprocess_config_default(&d);
        alpha0 = d.alpha0;
        alpha1 = d.alpha1;
        alpha2 = d.alpha2;
        size_thresh = d.size_thresh;
        ref_range = d.reference_range;
    }

    void add_flags(CLI::App* app) {
        app->add_option("--alpha0", alpha0, "Stage-one threshold over the mean frame")->capture_default_str();
        app->add_option("--alpha1", alpha1, "Threshold inside kept components")->capture_default_str();
        app->add_option("--alpha2", alpha2, "Threshold outside kept components")->capture_default_str();
        app->add_option("--size-thresh", size_thresh, "Component size threshold at the reference range")
            ->capture_default_str();
        app->add_option("--ref-range", ref_range, "Reference range in meters")->capture_default_str();
        app->add_flag("--sweep-config", sweep, "Allow degenerate alpha orderings (parameter sweeps)");
    }

    ek_preprocess_config config() const {
        return {alpha0, alpha1, alpha2, size_thresh, ref_range, sweep ? 1 : 0};
    }
};

json config_json(const ek_preprocess_config& c) {
    return {{"alpha0", c.alpha0},           {"alpha1", c.alpha1},
            {"alpha2", c.alpha2},           {"size_thresh", c.size_thresh},
            {"reference_range", c.reference_range}, {"sweep", c.sweep != 0}};
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects the run record written next to every subcommand's outputs.
class RunMetadata {
public:
    explicit RunMetadata(std::string subcommand)
        : subcommand_(std::move(subcommand)), started_(std::chrono::steady_clock::now()),
          started_at_(utc_timestamp()) {}

    void echo(const CLI::App* app) {
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
            std::string name = opt->get_name();
            while (!name.empty() && name.front() == '-') name.erase(0, 1);
            const auto& results = opt->results();
            if (opt->get_items_expected_max() == 0) params_[name] = opt->count() > 0;
            else if (!results.empty()) params_[name] = results.size() == 1 ? json(results[0]) : json(results);
            else params_[name] = opt->get_default_str();
        }
    }
    void param(const std::string& key, json value) { params_[key] = std::move(value); }
    void input(const std::string& path) { inputs_.push_back(path); }
    void output(const std::string& path) { outputs_.push_back(path); }
    json& extra() { return extra_; }

    void write(const fs::path& path) const {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        json j = {{"tool", "echokit"},
                  {"version", ek_version()},
                  {"subcommand", subcommand_},
                  {"parameters", params_},
                  {"inputs", inputs_},
                  {"outputs", outputs_},
                  {"started_at", started_at_},
                  {"duration_seconds", seconds}};
        if (!extra_.is_null()) j["details"] = extra_;
        write_text(path, j.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    std::chrono::steady_clock::time_point started_;
    std::string started_at_;
    json params_ = json::object();
    json inputs_ = json::array();
    json outputs_ = json::array();
    json extra_;
};

std::string meta_path_for(const std::string& override_path, const fs::path& default_path) {
    return override_path.empty() ? default_path.string() : override_path;
}

// ---------------------------------------------------------------------------

struct Globals {
    unsigned jobs = 1;
    std::string meta;
};

int cmd_synth(CLI::App* app, const Globals& g, const std::string& config_path, std::uint32_t suite, std::uint64_t seed,
              const std::string& out_dir) {
    RunMetadata meta("synth");
    meta.echo(app);
    if (config_path.empty() == (suite == 0))
        throw Failure{EK_ERR_ARGUMENT, "synth needs exactly one of --config or --suite N (N >= 1)"};
    ensure_directory(out_dir);

    std::vector<SynthPtr> configs;
    if (!config_path.empty()) {
        ek_synth* raw = nullptr;
        check(ek_synth_config_read(config_path.c_str(), &raw));
        configs.emplace_back(raw);
        meta.input(config_path);
    } else {
        for (std::uint32_t i = 0; i < suite; ++i) {
            ek_synth* raw = nullptr;
            check(ek_synth_suite_config(seed, i, &raw));
            configs.emplace_back(raw);
        }
    }

    std::vector<LabelsPtr> labels(configs.size());
    run_parallel(configs.size(), g.jobs, [&](std::size_t i) {
        ek_clip* clip = nullptr;
        ek_tracks* tracks = nullptr;
        ek_labels* lab = nullptr;
        check(ek_synth_run(configs[i].get(), &clip, &tracks, &lab));
        ClipPtr c(clip);
        TracksPtr t(tracks);
        labels[i].reset(lab);
        const std::string id = ek_synth_clip_id(configs[i].get());
        const fs::path base = fs::path(out_dir) / id;
        check(ek_clip_write(c.get(), (base.string() + ".svc").c_str()));
        check(ek_tracks_write(t.get(), (base.string() + ".tracks.json").c_str()));
        check(ek_labels_write(labels[i].get(), (base.string() + ".labels.jsonl").c_str()));
        char* text = nullptr;
        check(ek_synth_config_text(configs[i].get(), &text));
        CString owned(text);
        write_text(base.string() + ".synth.txt", text);
    });

    const LabelsPtr all = concat_labels(labels);
    const fs::path all_path = fs::path(out_dir) / "labels.jsonl";
    check(ek_labels_write(all.get(), all_path.string().c_str()));
    for (const SynthPtr& c : configs) {
        const std::string id = ek_synth_clip_id(c.get());
        for (const char* ext : {".svc", ".tracks.json", ".labels.jsonl", ".synth.txt"})
            meta.output((fs::path(out_dir) / (id + ext)).string());
    }
    meta.output(all_path.string());
    meta.write(meta_path_for(g.meta, fs::path(out_dir) / "synth.meta.json"));
    std::cout << "synthesized " << configs.size() << " clip(s) into " << out_dir << "\n";
    return 0;
}

int cmd_echogram(CLI::App* app, const Globals& g, const Preprocess& pp, const std::string& in,
                 const std::string& out) {
    RunMetadata meta("echogram");
    meta.echo(app);
    const ek_preprocess_config config = pp.config();
    check(ek_preprocess_config_validate(&config));
    const ClipPtr clip = read_clip(in);
    ek_echogram* raw = nullptr;
    const std::string clip_id = fs::path(in).stem().string();
    check(ek_echogram_build(clip.get(), &config, clip_id.c_str(), g.jobs, &raw));
    const EchogramPtr echogram(raw);
    ensure_parent(out);
    check(ek_echogram_write(echogram.get(), out.c_str()));
    meta.input(in);
    meta.output(out);
    meta.param("preprocess", config_json(config));
    meta.param("clip_id", clip_id);
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

int cmd_slice(CLI::App* app, const Globals& g, const std::string& in, std::uint32_t window, std::uint32_t stride,
              const std::string& out_dir) {
    RunMetadata meta("slice");
    meta.echo(app);
    if (window < 1 || stride < 1) throw Failure{EK_ERR_VALIDATION, "--window and --stride must be >= 1"};
    const EchogramPtr echogram = read_echogram(in);
    ensure_directory(out_dir);
    ek_echogram** slices = nullptr;
    std::size_t count = 0;
    check(ek_echogram_slice(echogram.get(), window, stride, &slices, &count));
    json listing = json::array();
    try {
        for (std::size_t i = 0; i < count; ++i) {
            ek_echogram_info info;
            check(ek_echogram_get_info(slices[i], &info));
            char* name = nullptr;
            check(ek_slice_file_name(ek_echogram_clip_id(slices[i]), info.x_offset, &name));
            CString owned(name);
            const fs::path path = fs::path(out_dir) / name;
            check(ek_echogram_write(slices[i], path.string().c_str()));
            meta.output(path.string());
            listing.push_back({{"file", name},
                               {"x_offset", info.x_offset},
                               {"padded", info.padded != 0},
                               {"pad_start", info.pad_start}});
        }
    } catch (...) {
        ek_echogram_array_free(slices, count);
        throw;
    }
    ek_echogram_array_free(slices, count);
    meta.input(in);
    meta.extra() = {{"slices", listing}};
    const std::string clip_id = fs::path(in).stem().string();
    meta.write(meta_path_for(g.meta, fs::path(out_dir) / (clip_id + ".slice.meta.json")));
    std::cout << "wrote " << count << " slice(s) to " << out_dir << "\n";
    return 0;
}

int cmd_augment(CLI::App* app, const Globals& g, const std::string& op_name, const std::string& in,
                const std::string& out, const std::string& labels_in, const std::string& labels_out) {
    RunMetadata meta("augment");
    meta.echo(app);
    ek_augment_op op;
    check(ek_augment_parse(op_name.c_str(), &op));
    if (labels_in.empty() != labels_out.empty())
        throw Failure{EK_ERR_ARGUMENT, "--labels and --labels-out go together"};
    const EchogramPtr slice = read_echogram(in);
    ek_echogram* raw = nullptr;
    check(ek_echogram_augment(slice.get(), op, &raw));
    const EchogramPtr result(raw);
    ensure_parent(out);
    check(ek_echogram_write(result.get(), out.c_str()));
    meta.input(in);
    meta.output(out);
    if (!labels_in.empty()) {
        const LabelsPtr labels = read_labels(labels_in);
        ek_labels* aug = nullptr;
        check(ek_labels_augment(labels.get(), op, &aug));
        const LabelsPtr owned(aug);
        ensure_parent(labels_out);
        check(ek_labels_write(owned.get(), labels_out.c_str()));
        meta.input(labels_in);
        meta.output(labels_out);
    }
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

int cmd_superpose(CLI::App* app, const Globals& g, const std::string& a, const std::string& b, const std::string& out,
                  const std::string& labels_a, const std::string& labels_b, const std::string& labels_out) {
    RunMetadata meta("superpose");
    meta.echo(app);
    const int label_flags = !labels_a.empty() + !labels_b.empty() + !labels_out.empty();
    if (label_flags != 0 && label_flags != 3)
        throw Failure{EK_ERR_ARGUMENT, "--labels-a, --labels-b and --labels-out go together"};
    const EchogramPtr ea = read_echogram(a);
    const EchogramPtr eb = read_echogram(b);
    ek_echogram* raw = nullptr;
    check(ek_echogram_superpose(ea.get(), eb.get(), &raw));
    const EchogramPtr result(raw);
    ensure_parent(out);
    check(ek_echogram_write(result.get(), out.c_str()));
    meta.input(a);
    meta.input(b);
    meta.output(out);
    if (label_flags == 3) {
        const LabelsPtr la = read_labels(labels_a);
        const LabelsPtr lb = read_labels(labels_b);
        ek_labels* sum = nullptr;
        check(ek_labels_superpose(la.get(), lb.get(), &sum));
        const LabelsPtr owned(sum);
        ensure_parent(labels_out);
        check(ek_labels_write(owned.get(), labels_out.c_str()));
        meta.input(labels_a);
        meta.input(labels_b);
        meta.output(labels_out);
    }
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

ek_label_source parse_source(const std::string& s) {
    if (s == "strong") return EK_SOURCE_STRONG;
    if (s == "weak") return EK_SOURCE_WEAK;
    if (s == "synthetic") return EK_SOURCE_SYNTHETIC;
    throw Failure{EK_ERR_VALIDATION, "--source must be strong|weak|synthetic"};
}

int cmd_label(CLI::App* app, const Globals& g, const std::string& tracks_path, std::uint32_t window,
              std::uint32_t frames, const std::string& out, const std::string& source, const std::string& pred_out) {
    RunMetadata meta("label");
    meta.echo(app);
    if (window < 1) throw Failure{EK_ERR_VALIDATION, "--window must be >= 1"};
    if (frames < 1) throw Failure{EK_ERR_VALIDATION, "--frames must be >= 1"};
    const ek_label_source src = parse_source(source);
    ek_tracks* raw = nullptr;
    check(ek_tracks_read(tracks_path.c_str(), &raw));
    const TracksPtr tracks(raw);
    ek_tracks* oriented_raw = nullptr;
    check(ek_tracks_orient(tracks.get(), &oriented_raw));
    const TracksPtr oriented(oriented_raw);
    ek_labels* labels_raw = nullptr;
    check(ek_tracks_count(oriented.get(), window, frames, src, &labels_raw));
    const LabelsPtr labels(labels_raw);
    ensure_parent(out);
    check(ek_labels_write(labels.get(), out.c_str()));
    meta.input(tracks_path);
    meta.output(out);
    if (!pred_out.empty()) {
        ek_predictions* preds = nullptr;
        check(ek_predictions_from_labels(labels.get(), &preds));
        const PredictionsPtr owned(preds);
        ensure_parent(pred_out);
        check(ek_predictions_write(owned.get(), pred_out.c_str()));
        meta.output(pred_out);
    }
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

int cmd_manifest(CLI::App* app, const Globals& g, const std::string& strong, const std::string& weak,
                 const std::string& splits, const std::string& out) {
    RunMetadata meta("manifest");
    meta.echo(app);
    ek_manifest* raw = nullptr;
    check(ek_manifest_build(strong.empty() ? nullptr : strong.c_str(), weak.empty() ? nullptr : weak.c_str(),
                            splits.c_str(), &raw));
    const ManifestPtr manifest(raw);
    ensure_parent(out);
    check(ek_manifest_write(manifest.get(), out.c_str()));
    if (!strong.empty()) meta.input(strong);
    if (!weak.empty()) meta.input(weak);
    meta.input(splits);
    meta.output(out);
    meta.extra() = {{"records", ek_manifest_size(manifest.get())}};
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

int cmd_manifest_check(CLI::App* app, const Globals& g, const std::string& in, const std::string& report_path) {
    RunMetadata meta("manifest-check");
    meta.echo(app);
    ek_manifest* raw = nullptr;
    check(ek_manifest_read(in.c_str(), &raw));
    const ManifestPtr manifest(raw);
    int disjoint = 0;
    char* report = nullptr;
    check(ek_manifest_check(manifest.get(), &disjoint, &report));
    const CString owned(report);
    meta.input(in);
    if (report_path.empty()) {
        std::cout << report;
        if (!g.meta.empty()) meta.write(g.meta);
    } else {
        write_text(report_path, report);
        meta.output(report_path);
        meta.write(meta_path_for(g.meta, report_path + ".meta.json"));
    }
    if (!disjoint) {
        std::cerr << "echokit: split leak: at least one clip appears in more than one split\n";
        return 1;
    }
    return 0;
}

int cmd_eval(CLI::App* app, const Globals& g, const std::string& pred, const std::string& labels_path,
             const std::string& report_path) {
    RunMetadata meta("eval");
    meta.echo(app);
    ek_predictions* raw = nullptr;
    check(ek_predictions_read(pred.c_str(), &raw));
    const PredictionsPtr predictions(raw);
    const LabelsPtr labels = read_labels(labels_path);
    ek_eval_report report;
    check(ek_evaluate(predictions.get(), labels.get(), &report));
    char* text = nullptr;
    check(ek_eval_report_json(&report, &text));
    const CString owned(text);
    meta.input(pred);
    meta.input(labels_path);
    if (report_path.empty()) {
        std::cout << text;
        if (!g.meta.empty()) meta.write(g.meta);
    } else {
        write_text(report_path, text);
        meta.output(report_path);
        meta.write(meta_path_for(g.meta, report_path + ".meta.json"));
    }
    return 0;
}

std::vector<ek_preprocess_config> read_config_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{EK_ERR_IO, "cannot open '" + path + "'"};
    std::vector<ek_preprocess_config> configs;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line[0] == '#' || line.rfind("alpha0", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        ek_preprocess_config c{};
        fields >> c.alpha0 >> c.alpha1 >> c.alpha2 >> c.size_thresh >> c.reference_range;
        if (!fields)
            throw Failure{EK_ERR_FORMAT, path + " line " + std::to_string(number) +
                                             ": expected alpha0,alpha1,alpha2,size_thresh,reference_range"};
        c.sweep = 1;
        configs.push_back(c);
    }
    return configs;
}

std::string csv_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

int cmd_sweep(CLI::App* app, const Globals& g, const std::string& clips_dir, std::uint32_t suite, std::uint64_t seed,
              const std::string& configs_path, double ref_range, const std::string& labels_path,
              const std::string& pred_dir, bool oracle, const std::string& echo_dir, const std::string& out) {
    RunMetadata meta("sweep");
    meta.echo(app);
    if (clips_dir.empty() == (suite == 0))
        throw Failure{EK_ERR_ARGUMENT, "sweep needs exactly one of --clips DIR or --suite N (N >= 1)"};

    std::vector<ek_preprocess_config> configs;
    if (configs_path.empty()) {
        std::size_t n = 0;
        check(ek_sweep_table(ref_range, nullptr, 0, &n));
        configs.resize(n);
        check(ek_sweep_table(ref_range, configs.data(), n, &n));
    } else {
        configs = read_config_csv(configs_path);
        meta.input(configs_path);
    }
    for (const auto& c : configs) check(ek_preprocess_config_validate(&c));

    std::vector<ClipPtr> clips;
    std::vector<std::string> ids;
    LabelsPtr labels;
    if (!clips_dir.empty()) {
        std::vector<fs::path> paths;
        for (const auto& entry : fs::directory_iterator(clips_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".svc") paths.push_back(entry.path());
        std::sort(paths.begin(), paths.end());
        if (paths.empty()) throw Failure{EK_ERR_ARGUMENT, "no .svc clips in '" + clips_dir + "'"};
        for (const fs::path& p : paths) {
            clips.push_back(read_clip(p.string()));
            ids.push_back(p.stem().string());
            meta.input(p.string());
        }
        if (!labels_path.empty()) {
            labels = read_labels(labels_path);
            meta.input(labels_path);
        }
    } else {
        clips.resize(suite);
        ids.resize(suite);
        std::vector<LabelsPtr> parts(suite);
        run_parallel(suite, g.jobs, [&](std::size_t i) {
            ek_synth* cfg = nullptr;
            check(ek_synth_suite_config(seed, static_cast<std::uint32_t>(i), &cfg));
            const SynthPtr owned(cfg);
            ek_clip* clip = nullptr;
            ek_labels* lab = nullptr;
            check(ek_synth_run(owned.get(), &clip, nullptr, &lab));
            clips[i].reset(clip);
            parts[i].reset(lab);
            ids[i] = ek_synth_clip_id(owned.get());
        });
        labels = labels_path.empty() ? concat_labels(parts) : read_labels(labels_path);
    }
    if ((oracle || !pred_dir.empty()) && !labels)
        throw Failure{EK_ERR_ARGUMENT, "scoring needs --labels (or --suite, which carries its own labels)"};
    if (oracle && !pred_dir.empty()) throw Failure{EK_ERR_ARGUMENT, "--oracle and --pred-dir are exclusive"};
    if (!echo_dir.empty()) ensure_directory(echo_dir);

    // nonzero[config][clip]
    std::vector<std::vector<std::size_t>> nonzero(configs.size(), std::vector<std::size_t>(clips.size(), 0));
    std::vector<std::size_t> pixels(clips.size(), 0);
    run_parallel(clips.size(), g.jobs, [&](std::size_t k) {
        for (std::size_t c = 0; c < configs.size(); ++c) {
            ek_echogram* raw = nullptr;
            check(ek_echogram_build(clips[k].get(), &configs[c], ids[k].c_str(), 1, &raw));
            const EchogramPtr e(raw);
            check(ek_echogram_nonzero_count(e.get(), &nonzero[c][k]));
            ek_echogram_info info;
            check(ek_echogram_get_info(e.get(), &info));
            pixels[k] = std::size_t(info.width) * info.height;
            if (!echo_dir.empty()) {
                const fs::path path = fs::path(echo_dir) / ("config" + std::to_string(c) + "_" + ids[k] + ".ecg");
                check(ek_echogram_write(e.get(), path.string().c_str()));
            }
        }
    });

    std::size_t total_pixels = 0;
    for (std::size_t p : pixels) total_pixels += p;

    std::ostringstream csv;
    csv << "config,alpha0,alpha1,alpha2,size_thresh,reference_range,n_clips,total_pixels,nonzero_pixels,"
           "nonzero_fraction,total_nmae,left_nmae,right_nmae\n";
    json rows = json::array();
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::size_t nz = 0;
        for (std::size_t v : nonzero[c]) nz += v;
        std::optional<ek_eval_report> report;
        if (oracle || !pred_dir.empty()) {
            PredictionsPtr preds;
            if (oracle) {
                ek_predictions* raw = nullptr;
                check(ek_predictions_from_labels(labels.get(), &raw));
                preds.reset(raw);
            } else {
                const fs::path p = fs::path(pred_dir) / ("config" + std::to_string(c) + ".jsonl");
                if (fs::exists(p)) {
                    ek_predictions* raw = nullptr;
                    check(ek_predictions_read(p.string().c_str(), &raw));
                    preds.reset(raw);
                    meta.input(p.string());
                }
            }
            if (preds) {
                ek_eval_report r;
                check(ek_evaluate(preds.get(), labels.get(), &r));
                report = r;
            }
        }
        auto field = [&](bool defined, double v) { return report && defined ? csv_number(v) : std::string{}; };
        const ek_preprocess_config& k = configs[c];
        csv << c << ',' << csv_number(k.alpha0) << ',' << csv_number(k.alpha1) << ',' << csv_number(k.alpha2) << ','
            << csv_number(k.size_thresh) << ',' << csv_number(k.reference_range) << ',' << clips.size() << ','
            << total_pixels << ',' << nz << ',' << csv_number(total_pixels ? double(nz) / total_pixels : 0.0) << ','
            << field(report && report->total_defined, report ? report->total_nmae : 0) << ','
            << field(report && report->left_defined, report ? report->left_nmae : 0) << ','
            << field(report && report->right_defined, report ? report->right_nmae : 0) << "\n";
        rows.push_back({{"config", config_json(k)}, {"nonzero_pixels", nz}});
    }
    write_text(out, csv.str());
    meta.output(out);
    meta.extra() = {{"rows", rows}, {"clips", ids}};
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

int cmd_export_png(CLI::App* app, const Globals& g, const std::string& in, const std::string& out) {
    RunMetadata meta("export-png");
    meta.echo(app);
    const EchogramPtr echogram = read_echogram(in);
    ensure_parent(out);
    check(ek_echogram_export_png(echogram.get(), out.c_str()));
    meta.input(in);
    meta.output(out);
    meta.write(meta_path_for(g.meta, out + ".meta.json"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"echokit: sonar clip -> echogram toolkit for fish counting"};
    app.set_version_flag("--version", std::string(ek_version()));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    g.jobs = default_jobs();
    app.add_option("--jobs,-j", g.jobs, "Worker threads (default: $ECHOKIT_JOBS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--meta", g.meta, "Write run metadata JSON here instead of next to the output");

    // synth
    std::string synth_config, synth_out;
    std::uint32_t synth_suite = 0;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate synthetic clips with ground-truth tracks and labels");
    synth->add_option("--config", synth_config, "Plain-text synth config")->check(CLI::ExistingFile);
    synth->add_option("--suite", synth_suite, "Generate N varied scenarios instead of one config");
    synth->add_option("--seed", synth_seed, "Suite seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();

    // echogram
    std::string eg_in, eg_out;
    Preprocess eg_pp;
    auto* echogram = app.add_subcommand("echogram", "Clean a clip and collapse it into an ECG1 echogram");
    echogram->add_option("--in", eg_in, "SVC1 clip")->required();
    echogram->add_option("--out", eg_out, "ECG1 output")->required();
    eg_pp.add_flags(echogram);

    // slice
    std::string sl_in, sl_out;
    std::uint32_t sl_window = 200, sl_stride = 200;
    auto* slice = app.add_subcommand("slice", "Cut an echogram into fixed-width windows");
    slice->add_option("--in", sl_in, "ECG1 echogram")->required();
    slice->add_option("--window", sl_window, "Window width in frames")->capture_default_str();
    slice->add_option("--stride", sl_stride, "Stride in frames")->capture_default_str();
    slice->add_option("--out", sl_out, "Output directory")->required();

    // augment
    std::string au_op, au_in, au_out, au_labels, au_labels_out;
    auto* augment = app.add_subcommand("augment", "Flip an echogram slice (vflip|hflip|rhflip)");
    augment->add_option("--op", au_op, "vflip | hflip (naive) | rhflip (realistic)")->required();
    augment->add_option("--in", au_in, "ECG1 slice")->required();
    augment->add_option("--out", au_out, "ECG1 output")->required();
    augment->add_option("--labels", au_labels, "Sidecar labels JSONL to transform");
    augment->add_option("--labels-out", au_labels_out, "Transformed labels JSONL");

    // superpose
    std::string sp_a, sp_b, sp_out, sp_la, sp_lb, sp_lout;
    auto* superpose = app.add_subcommand("superpose", "Overlay two slices, brightest pixel wins, counts add");
    superpose->add_option("--a", sp_a, "First ECG1 slice")->required();
    superpose->add_option("--b", sp_b, "Second ECG1 slice")->required();
    superpose->add_option("--out", sp_out, "ECG1 output")->required();
    superpose->add_option("--labels-a", sp_la, "Labels JSONL for --a");
    superpose->add_option("--labels-b", sp_lb, "Labels JSONL for --b");
    superpose->add_option("--labels-out", sp_lout, "Summed labels JSONL");

    // label
    std::string lb_tracks, lb_out, lb_source = "weak", lb_pred;
    std::uint32_t lb_window = 200, lb_frames = 0;
    auto* label = app.add_subcommand("label", "Turn tracks into per-window left/right counts");
    label->add_option("--tracks", lb_tracks, "Tracks JSON")->required();
    label->add_option("--window", lb_window, "Window width in frames")->capture_default_str();
    label->add_option("--frames", lb_frames, "Total frames in the clip")->required();
    label->add_option("--out", lb_out, "Labels JSONL")->required();
    label->add_option("--source", lb_source, "strong | weak | synthetic")->capture_default_str();
    label->add_option("--pred-out", lb_pred, "Also write the labels as a predictions JSONL");

    // manifest
    std::string mf_strong, mf_weak, mf_splits, mf_out;
    auto* manifest = app.add_subcommand("manifest", "Build a train/val/test manifest from labeled slices");
    manifest->add_option("--strong", mf_strong, "Directory of strongly labeled slices");
    manifest->add_option("--weak", mf_weak, "Directory of weakly labeled slices");
    manifest->add_option("--splits", mf_splits, "Split assignment JSON")->required();
    manifest->add_option("--out", mf_out, "Manifest JSONL")->required();

    // manifest-check
    std::string mc_in, mc_report;
    auto* manifest_check = app.add_subcommand("manifest-check", "Check split disjointness and class balance");
    manifest_check->add_option("--in", mc_in, "Manifest JSONL")->required();
    manifest_check->add_option("--report", mc_report, "Write the report here instead of stdout");

    // eval
    std::string ev_pred, ev_labels, ev_report;
    auto* eval = app.add_subcommand("eval", "Score predictions against labels with nMAE");
    eval->add_option("--pred", ev_pred, "Predictions JSONL")->required();
    eval->add_option("--labels", ev_labels, "Labels JSONL")->required();
    eval->add_option("--report", ev_report, "Report JSON (default: stdout)");

    // sweep
    std::string sw_clips, sw_configs, sw_labels, sw_pred_dir, sw_echo_dir, sw_out;
    std::uint32_t sw_suite = 0;
    std::uint64_t sw_seed = 0;
    double sw_ref = 0;
    {
        ek_preprocess_config d;
        ek_preprocess_config_default(&d);
        sw_ref = d.reference_range;
    }
    bool sw_oracle = false;
    auto* sweep = app.add_subcommand("sweep", "Run echogram configurations over a clip set and tabulate results");
    sweep->add_option("--clips", sw_clips, "Directory of .svc clips")->check(CLI::ExistingDirectory);
    sweep->add_option("--suite", sw_suite, "Use an N-clip synthetic suite instead");
    sweep->add_option("--seed", sw_seed, "Suite seed")->capture_default_str();
    sweep->add_option("--configs", sw_configs, "CSV of alpha0,alpha1,alpha2,size_thresh,reference_range");
    sweep->add_option("--ref-range", sw_ref, "Reference range for the built-in table")->capture_default_str();
    sweep->add_option("--labels", sw_labels, "Labels JSONL for scoring");
    sweep->add_option("--pred-dir", sw_pred_dir, "Directory holding config<i>.jsonl predictions");
    sweep->add_flag("--oracle", sw_oracle, "Score the labels themselves as predictions");
    sweep->add_option("--echo-dir", sw_echo_dir, "Also write every echogram here");
    sweep->add_option("--out", sw_out, "CSV output")->required();

    // export-png
    std::string px_in, px_out;
    auto* export_png = app.add_subcommand("export-png", "Render an echogram to PNG (lateral position as hue)");
    export_png->add_option("--in", px_in, "ECG1 echogram")->required();
    export_png->add_option("--out", px_out, "PNG output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth, g, synth_config, synth_suite, synth_seed, synth_out);
        if (echogram->parsed()) return cmd_echogram(echogram, g, eg_pp, eg_in, eg_out);
        if (slice->parsed()) return cmd_slice(slice, g, sl_in, sl_window, sl_stride, sl_out);
        if (augment->parsed()) return cmd_augment(augment, g, au_op, au_in, au_out, au_labels, au_labels_out);
        if (superpose->parsed()) return cmd_superpose(superpose, g, sp_a, sp_b, sp_out, sp_la, sp_lb, sp_lout);
        if (label->parsed()) return cmd_label(label, g, lb_tracks, lb_window, lb_frames, lb_out, lb_source, lb_pred);
        if (manifest->parsed()) return cmd_manifest(manifest, g, mf_strong, mf_weak, mf_splits, mf_out);
        if (manifest_check->parsed()) return cmd_manifest_check(manifest_check, g, mc_in, mc_report);
        if (eval->parsed()) return cmd_eval(eval, g, ev_pred, ev_labels, ev_report);
        if (sweep->parsed())
            return cmd_sweep(sweep, g, sw_clips, sw_suite, sw_seed, sw_configs, sw_ref, sw_labels, sw_pred_dir,
                             sw_oracle, sw_echo_dir, sw_out);
        if (export_png->parsed()) return cmd_export_png(export_png, g, px_in, px_out);
    } catch (const Failure& f) {
        std::cerr << "echokit: " << ek_status_name(f.status) << ": " << f.message << "\n";
        return f.status == EK_ERR_ARGUMENT ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "echokit: internal error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 2;
}
